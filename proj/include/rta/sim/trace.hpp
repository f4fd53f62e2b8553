#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rta/allocator/problem.hpp"
#include "rta/sim/scenario.hpp"

namespace rta {

struct SimEvent {
  int tick = 0;
  double time = 0.0;
  std::string type;
  nlohmann::json data;
};

/// Full record of one simulation run: per-tick robot, degradation, and
/// margin rows, the event stream, and summary figures.
struct SimTrace {
  ScenarioConfig config;

  struct RobotRow {
    int tick;
    double t;
    int robot;
    double x, y;
    int task;
    double dv, dv_smoothed;
  };
  struct DegradationRow {
    int tick;
    double t;
    int task;
    int capability;
    double d, d_star;
  };
  struct MarginRow {
    int tick;
    double t;
    int task;
    int capability;
    double delta;
  };

  std::vector<RobotRow> robot_rows;
  std::vector<DegradationRow> degradation_rows;
  std::vector<MarginRow> margin_rows;
  std::vector<SimEvent> events;

  // Selected requirement configuration per task, one entry per logged tick.
  std::vector<std::vector<int>> selected_config;

  int ticks = 0;
  int solve_count = 0;
  bool initial_infeasible = false;
  Matrix min_margins;  // per task x capability over the whole run
  std::vector<double> solve_wall_ms;

  IntMatrix final_A;
  std::vector<IntVector> final_iota;
  IntVector final_phi;

  int event_count(const std::string& type) const;
  const SimEvent* find_event(const std::string& type, int nth = 0) const;

  /// Margin of one task/capability at a given tick (from the logged rows).
  double margin_at(int tick, int task, int capability) const;
};

/// Writes robots.csv, degradation.csv, margins.csv, events.jsonl and
/// summary.json into the directory (created if missing). All files except
/// the timing block of summary.json are byte-deterministic for a fixed
/// config and seed.
void write_trace_files(const SimTrace& trace, const std::string& out_dir);

}  // namespace rta
