#pragma once

#include "rta/allocator/problem.hpp"
#include "rta/rng.hpp"

namespace rta {

/// Seeded random small instance for oracle cross-checks: N <= 5, M <= 2,
/// U <= 3, K_m <= 2, with occasional empty teams, zero capabilities, tight
/// availability, excluded robots, and small delta_max so the infeasible path
/// is exercised too.
AllocationProblem random_small_instance(Rng& rng);

}  // namespace rta
