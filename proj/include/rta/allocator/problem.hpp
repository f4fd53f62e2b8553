#pragma once

#include <string>
#include <vector>

#include "rta/linalg.hpp"
#include "rta/team_model.hpp"

namespace rta {

/// Full input of the resilient task-allocation program.
struct AllocationProblem {
  CapabilityMatrix capabilities;  // Q and its labels
  SpeciesMapping mapping;         // P and lambda

  std::vector<Matrix> requirements;  // Y*_m, each K_m x U
  Matrix degradation;                // M x U, rows d_m in [0,1]
  Vector task_priorities;            // w_J, size M
  Vector deploy_costs;               // diagonal of W_s, size S
  Vector transition_costs;           // diagonal of T, size M
  IntMatrix previous_allocation;     // A_p, M x N
  Vector discrepancies;              // smoothed per-robot discrepancies, size N

  double margin_weight = 1.0;  // l
  double delta_max = 1000.0;
  double dv_thresh = 1.0;

  int num_tasks() const { return static_cast<int>(requirements.size()); }
  int num_robots() const { return mapping.num_robots(); }
  int num_species() const { return mapping.num_species(); }
  int num_capabilities() const { return capabilities.num_capabilities(); }

  /// 1 if the robot may be allocated at all, 0 if its discrepancy disqualifies
  /// it. Integer form of the per-robot column-sum cap.
  int eligibility(int robot) const;

  /// Structural validation; throws std::invalid_argument on the first defect.
  void validate() const;
};

struct SolverStats {
  long nodes = 0;
  double wall_ms = 0.0;
  double gap = 0.0;  // certified absolute optimality gap
};

struct AllocationSolution {
  bool feasible = false;
  std::string infeasibility;  // violated constraint family when infeasible

  IntMatrix A;                  // M x N
  std::vector<IntVector> iota;  // selected configuration per task
  IntVector phi;                // relaxation flags
  Matrix D;                     // M x U capability margins
  double objective = 0.0;
  SolverStats stats;
};

/// delta_m = (1 - d_m) .* (A_m P' Q)' - (iota_m' Y*_m)' for every task.
Matrix margins(const IntMatrix& A, const std::vector<IntVector>& iota,
               const AllocationProblem& problem);

/// Exact objective of an integral assignment (deployment + relaxation +
/// squared margin sums + L1 transition cost).
double exact_objective(const IntMatrix& A, const std::vector<IntVector>& iota,
                       const IntVector& phi, const AllocationProblem& problem);

/// Replays every constraint of the program against a solution; returns all
/// violations (empty means the solution is feasible and self-consistent).
std::vector<std::string> check_solution(const AllocationProblem& problem,
                                        const AllocationSolution& solution);

/// Lexicographic order on (phi, vec(A), vec(iota)); the tie-break rule shared
/// by the enumeration oracle and the branch-and-bound solver.
bool lex_less(const AllocationSolution& a, const AllocationSolution& b);

}  // namespace rta
