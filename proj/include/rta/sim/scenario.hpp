#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rta/allocator/problem.hpp"
#include "rta/rng.hpp"
#include "rta/tasks.hpp"
#include "rta/team_model.hpp"

namespace rta {

struct SpeciesSpec {
  std::string name;
  Vector capabilities;
  int count = 0;
  double deploy_cost = 0.1;
};

/// Full simulation configuration: team, tasks, disturbance schedule, solver
/// and loop parameters. Parsed from a scenario file (JSON with comments) or
/// produced by the builtin library.
struct ScenarioConfig {
  std::string name;
  std::vector<std::string> capability_names;
  std::vector<SpeciesSpec> species;
  std::optional<IntVector> lambda;  // defaults to the species counts

  std::vector<TaskDefinition> tasks;
  std::vector<DisturbanceSpec> disturbances;

  std::optional<std::vector<Vec2>> positions;  // explicit robot placement
  Region spawn{Vec2(-5.0, -5.0), Vec2(5.0, 5.0)};

  double dt = 0.05;
  double duration = 20.0;
  double chi = 0.33;
  double dv_thresh = 0.9;
  double margin_weight = 1.0;
  double delta_max = 1000.0;
  double gain = 0.5;
  double speed_limit = 2.0;
  int coverage_grid = 48;
  std::uint64_t seed = 1;
  bool trigger_enabled = true;

  double gap_tol = 1e-6;
  long node_limit = 1000000;

  int num_robots() const;
  int num_species() const { return static_cast<int>(species.size()); }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_capabilities() const {
    return static_cast<int>(capability_names.size());
  }

  CapabilityMatrix capability_matrix() const;
  SpeciesMapping species_mapping() const;
  int species_of(int robot) const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Loads a scenario by builtin name or file path; file parse errors carry
/// field-path diagnostics.
ScenarioConfig load_scenario(const std::string& name_or_path);
ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin);

std::vector<std::pair<std::string, std::string>> builtin_scenario_names();
ScenarioConfig builtin_scenario(const std::string& name);

/// Coverage-and-tracking allocation instance scaled to a team of n robots
/// (roughly 80% aerial), used by the benchmark subcommand.
AllocationProblem scaled_benchmark_problem(int n_robots, Rng& rng);

}  // namespace rta
