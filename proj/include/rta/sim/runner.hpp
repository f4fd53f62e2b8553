#pragma once

#include <string>
#include <vector>

#include "rta/allocator/problem.hpp"
#include "rta/sim/scenario.hpp"
#include "rta/sim/trace.hpp"
#include "rta/tasks.hpp"

namespace rta {

/// Executes the event-triggered allocation loop: an initial solve, then per
/// tick task execution, discrepancy and degradation updates, the trigger
/// test, and conditional re-solves. Deterministic for a fixed config.
SimTrace run_scenario(const ScenarioConfig& config);

/// Installs a solution's assignments on the robot states (task id per robot,
/// -1 for an all-zero column).
void apply_allocation(const AllocationSolution& solution,
                      std::vector<RobotState>& robots);

enum class RandomizeMode { none, env, params };

/// Per-trial margin series for the tracking tasks, for the reallocation run
/// and the allocate-once baseline of the same randomized scenario.
struct TrialSeries {
  std::uint64_t seed = 0;
  std::vector<double> fault_times;
  // Per tick: min over tracking tasks and capabilities of the margin, raw
  // and with the epsilon allowance (fraction of the selected requirement).
  std::vector<double> with_min_margin;
  std::vector<double> with_min_margin_eps;
  std::vector<double> without_min_margin;
  std::vector<double> without_min_margin_eps;
  int with_solves = 0;
  int without_solves = 0;
};

struct TrialsSummary {
  double eps_fraction = 0.05;
  double dt = 0.0;
  std::vector<TrialSeries> trials;
  // Worst case across trials, per tick.
  std::vector<double> worst_with;
  std::vector<double> worst_without;
};

/// Runs seeded randomized trials of a scenario in both modes. `env`
/// randomizes disturbance timing, target schedules, and initial positions;
/// `params` perturbs the optimization constants by the 40%-of-mean normal
/// rule (clamped to valid ranges).
TrialsSummary randomized_trials(const ScenarioConfig& base, int n_trials,
                                RandomizeMode mode, double eps_fraction = 0.05);

/// The scenario variant a given trial runs (exposed for reproducing a single
/// trial in isolation).
ScenarioConfig randomize_scenario(const ScenarioConfig& base, int trial,
                                  RandomizeMode mode);

/// Tracking-margin series of a finished run: per tick, the minimum margin
/// over target-tracking tasks, raw and with the epsilon allowance.
void tracking_margin_series(const SimTrace& trace, double eps_fraction,
                            std::vector<double>& raw,
                            std::vector<double>& with_eps);

}  // namespace rta
