#include "rta/degradation.hpp"

#include <stdexcept>

namespace rta {

Vector instantaneous_degradation(const Vector& dv, const IntMatrix& P_sub,
                                 const IntMatrix& Q_bar_sub) {
  const int num_species = static_cast<int>(P_sub.rows());
  const int num_caps = static_cast<int>(Q_bar_sub.cols());
  if (Q_bar_sub.rows() != num_species) {
    throw std::invalid_argument(
        "instantaneous_degradation: species count mismatch between P and "
        "Q_bar submatrices");
  }
  if (dv.size() != P_sub.cols()) {
    throw std::invalid_argument(
        "instantaneous_degradation: discrepancy vector does not match robot "
        "count");
  }
  if (dv.size() == 0) return Vector::Zero(num_caps);

  // Row-normalized P * dv: mean discrepancy per species.
  Vector species_dv = Vector::Zero(num_species);
  for (int s = 0; s < num_species; ++s) {
    int row_sum = P_sub.row(s).sum();
    if (row_sum == 0) continue;
    double acc = 0.0;
    for (int i = 0; i < P_sub.cols(); ++i) {
      if (P_sub(s, i) != 0) acc += dv(i);
    }
    species_dv(s) = acc / row_sum;
  }

  // Column-normalized Q_bar^T * species_dv: mean over species possessing
  // each capability; capabilities absent from the task stay at zero.
  Vector d_star = Vector::Zero(num_caps);
  for (int u = 0; u < num_caps; ++u) {
    int col_sum = Q_bar_sub.col(u).sum();
    if (col_sum == 0) continue;
    double acc = 0.0;
    for (int s = 0; s < num_species; ++s) {
      if (Q_bar_sub(s, u) != 0) acc += species_dv(s);
    }
    d_star(u) = acc / col_sum;
  }
  return d_star;
}

IntVector capability_indicator(const IntMatrix& Q_bar_sub) {
  IntVector theta = IntVector::Zero(Q_bar_sub.cols());
  for (int u = 0; u < Q_bar_sub.cols(); ++u) {
    theta(u) = Q_bar_sub.col(u).sum() > 0 ? 1 : 0;
  }
  return theta;
}

Vector update_degradation(const Vector& d, const Vector& d_star,
                          const IntVector& theta, double dt) {
  if (d.size() != d_star.size() || d.size() != theta.size()) {
    throw std::invalid_argument("update_degradation: size mismatch");
  }
  if (dt <= 0.0 || dt > 1.0) {
    throw std::invalid_argument("update_degradation: dt must be in (0,1]");
  }
  Vector next = d;
  for (int u = 0; u < d.size(); ++u) {
    if (theta(u) != 0) next(u) = d(u) + dt * (d_star(u) - d(u));
  }
  return next;
}

bool reallocation_trigger(const Matrix& d, const Matrix& d_snapshot,
                          double chi) {
  if (d.rows() != d_snapshot.rows() || d.cols() != d_snapshot.cols()) {
    throw std::invalid_argument("reallocation_trigger: shape mismatch");
  }
  for (int m = 0; m < d.rows(); ++m) {
    for (int u = 0; u < d.cols(); ++u) {
      if (d(m, u) - d_snapshot(m, u) >= chi) return true;
    }
  }
  return false;
}

}  // namespace rta
