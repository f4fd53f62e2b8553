#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rta/allocator/problem.hpp"

namespace rta {

/// Parsed command line. Exactly one subcommand; overrides are validated
/// against the scenario invariants before anything runs.
struct CommandSpec {
  std::string subcommand;  // run | solve | oracle-check | bench | scenarios

  // run
  std::string scenario;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> chi, dv_thresh, margin_weight, delta_max, dt, duration;
  bool no_trigger = false;
  int trials = 0;
  std::string randomize = "env";

  // solve
  std::string problem_file;
  std::string solution_out;
  double gap_tol = 1e-6;
  long node_limit = 1000000;

  // oracle-check
  int instances = 100;
  std::uint64_t oracle_seed = 2024;
  double corrupt_bound = 0.0;

  // bench
  std::vector<int> sizes;
  int repetitions = 3;
};

/// Reads a standalone allocation problem (the `solve` subcommand's format).
AllocationProblem parse_problem_file(const std::string& path);

// Exit codes: 0 success, 1 config error, 2 infeasible at start, 3 internal.
int cmd_run(const CommandSpec& spec);
int cmd_solve(const CommandSpec& spec);
int cmd_oracle_check(const CommandSpec& spec);
int cmd_bench(const CommandSpec& spec);
int cmd_scenarios(const CommandSpec& spec);

int dispatch(const CommandSpec& spec);

}  // namespace rta
