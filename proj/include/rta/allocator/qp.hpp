#pragma once

#include <utility>
#include <vector>

#include "rta/linalg.hpp"

namespace rta {

/// Sparse linear row: coeffs * x (compared against rhs).
struct SparseRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;

  double dot(const Vector& x) const {
    double acc = 0.0;
    for (const auto& [j, v] : coeffs) acc += v * x(j);
    return acc;
  }
};

/// Convex quadratic program
///   minimize    0.5 x'Hx + g'x
///   subject to  ineq:  row.coeffs * x >= row.rhs
///               eq:    row.coeffs * x  = row.rhs
///               lb <= x <= ub          (finite, lb < ub strictly)
/// H must be positive semidefinite; the finite boxes make the Newton systems
/// definite.
struct QpProblem {
  int n = 0;
  Matrix H;
  Vector g;
  std::vector<SparseRow> ineq;
  std::vector<SparseRow> eq;
  Vector lb, ub;
};

enum class QpStatus { optimal, max_iterations, infeasible };

struct QpResult {
  QpStatus status = QpStatus::max_iterations;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
  double complementarity = 0.0;   // final mu
  double primal_infeasibility = 0.0;  // max constraint violation at x
};

struct QpSettings {
  double tolerance = 1e-11;
  int max_iterations = 120;
};

/// Mehrotra predictor-corrector interior point method, dense factorizations.
QpResult solve_qp(const QpProblem& qp, const QpSettings& settings = {});

/// Minimum achievable infinity-norm violation of the constraint system
/// (boxes respected exactly). Values above ~1e-7 certify infeasibility.
double min_constraint_violation(const QpProblem& qp);

}  // namespace rta
