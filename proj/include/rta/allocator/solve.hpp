#pragma once

#include <string>

#include "rta/allocator/model.hpp"
#include "rta/allocator/problem.hpp"

namespace rta {

struct SolveSettings {
  double gap_tol = 1e-6;
  long node_limit = 1000000;
  // Test hook: inflates every node lower bound, deliberately breaking bound
  // validity so negative-control tests can observe wrongful pruning.
  double corrupt_bound = 0.0;
};

/// Best-first branch-and-bound over the binary variables with convex QP
/// relaxations at the nodes. Returns a solution within gap_tol of the global
/// optimum (certified gap reported in stats), the best incumbent with an
/// honest gap when the node limit runs out, or an infeasibility report
/// naming the violated constraint family.
AllocationSolution solve(const MiqpModel& model, const SolveSettings& settings);
AllocationSolution solve(const MiqpModel& model, double gap_tol = 1e-6,
                         long node_limit = 1000000);

/// Exhaustive ground-truth oracle over all assignments, configurations, and
/// relaxation flags. Ties broken lexicographically by (phi, vec(A),
/// vec(iota)). Refuses search spaces above 1e7 with the computed size.
AllocationSolution enumerate_optimal(const AllocationProblem& problem);

/// Names the constraint family that makes the program infeasible.
std::string diagnose_infeasibility(const AllocationProblem& problem);

/// Objective of the root relaxation (all binaries in [0,1]); a certified
/// lower bound on the optimal objective.
double root_relaxation_objective(const MiqpModel& model);

}  // namespace rta
