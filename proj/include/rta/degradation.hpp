#pragma once

#include <vector>

#include "rta/linalg.hpp"
#include "rta/team_model.hpp"

namespace rta {

/// Instantaneous per-capability degradation of one task, mapped from the
/// per-robot discrepancies through the species and capability structure.
/// P_sub is the species-by-robot submatrix restricted to the species and
/// robots present in the task; Q_bar_sub holds those species' rows of the
/// binary capability matrix (all U columns). Rows of P_sub and columns of
/// Q_bar_sub are L1-normalized so the result stays in [0,1]: the species
/// entry becomes the mean discrepancy of its robots, and each capability
/// entry the mean over the species that possess it.
Vector instantaneous_degradation(const Vector& dv, const IntMatrix& P_sub,
                                 const IntMatrix& Q_bar_sub);

/// Binary diagonal indicator of which capabilities are present on any
/// species allocated to the task.
IntVector capability_indicator(const IntMatrix& Q_bar_sub);

/// d <- d + dt * Theta * (d_star - d); entries gated off by Theta hold.
Vector update_degradation(const Vector& d, const Vector& d_star,
                          const IntVector& theta, double dt);

/// One-sided reallocation trigger: fires iff some entry rose by at least chi
/// since the snapshot taken at the last solve.
bool reallocation_trigger(const Matrix& d, const Matrix& d_snapshot,
                          double chi);

/// Per-task degradation state plus the snapshot the trigger compares against.
class DegradationState {
 public:
  DegradationState() = default;
  DegradationState(int num_tasks, int num_capabilities)
      : d_(Matrix::Zero(num_tasks, num_capabilities)),
        snapshot_(Matrix::Zero(num_tasks, num_capabilities)) {}

  const Matrix& d() const { return d_; }
  const Matrix& snapshot() const { return snapshot_; }
  Vector task_row(int m) const { return d_.row(m).transpose(); }

  void update_task(int m, const Vector& d_star, const IntVector& theta,
                   double dt) {
    d_.row(m) =
        update_degradation(d_.row(m).transpose(), d_star, theta, dt)
            .transpose();
  }

  bool should_trigger(double chi) const {
    return reallocation_trigger(d_, snapshot_, chi);
  }

  /// Called when the allocation program actually ran (t_l = t).
  void on_solved(int tick) {
    snapshot_ = d_;
    last_solve_tick_ = tick;
  }

  int last_solve_tick() const { return last_solve_tick_; }

 private:
  Matrix d_;
  Matrix snapshot_;
  int last_solve_tick_ = 0;
};

}  // namespace rta
