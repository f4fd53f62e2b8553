#pragma once

#include <Eigen/Dense>

namespace rta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;
using IntVector = Eigen::VectorXi;
using Vec2 = Eigen::Vector2d;

}  // namespace rta
