#include "rta/sim/trace.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rta {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

int SimTrace::event_count(const std::string& type) const {
  int n = 0;
  for (const auto& e : events) {
    if (e.type == type) ++n;
  }
  return n;
}

const SimEvent* SimTrace::find_event(const std::string& type, int nth) const {
  for (const auto& e : events) {
    if (e.type == type && nth-- == 0) return &e;
  }
  return nullptr;
}

double SimTrace::margin_at(int tick, int task, int capability) const {
  const int per_tick =
      config.num_tasks() * config.num_capabilities();
  long idx = static_cast<long>(tick - 1) * per_tick +
             task * config.num_capabilities() + capability;
  if (idx < 0 || idx >= static_cast<long>(margin_rows.size())) {
    throw std::out_of_range("margin_at: no row for that tick");
  }
  return margin_rows[idx].delta;
}

void write_trace_files(const SimTrace& trace, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& names = trace.config.capability_names;

  {
    auto out = open_out(fs::path(out_dir) / "robots.csv");
    out << "t,robot_id,x,y,task_id,dV,dV_smoothed\n";
    for (const auto& r : trace.robot_rows) {
      out << fmt(r.t) << ',' << r.robot << ',' << fmt(r.x) << ',' << fmt(r.y)
          << ',' << r.task << ',' << fmt(r.dv) << ',' << fmt(r.dv_smoothed)
          << '\n';
    }
  }
  {
    auto out = open_out(fs::path(out_dir) / "degradation.csv");
    out << "t,task_id,capability_name,d,d_star\n";
    for (const auto& r : trace.degradation_rows) {
      out << fmt(r.t) << ',' << r.task << ',' << names.at(r.capability) << ','
          << fmt(r.d) << ',' << fmt(r.d_star) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(out_dir) / "margins.csv");
    out << "t,task_id,capability,delta\n";
    for (const auto& r : trace.margin_rows) {
      out << fmt(r.t) << ',' << r.task << ',' << names.at(r.capability) << ','
          << fmt(r.delta) << '\n';
    }
  }
  {
    auto out = open_out(fs::path(out_dir) / "events.jsonl");
    for (const auto& e : trace.events) {
      nlohmann::json j;
      j["tick"] = e.tick;
      j["t"] = e.time;
      j["type"] = e.type;
      j["data"] = e.data;
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open_out(fs::path(out_dir) / "summary.json");
    nlohmann::json j;
    j["scenario"] = trace.config.name;
    j["ticks"] = trace.ticks;
    j["solve_count"] = trace.solve_count;
    j["initial_infeasible"] = trace.initial_infeasible;
    j["config"] = {{"dt", trace.config.dt},
                   {"duration", trace.config.duration},
                   {"chi", trace.config.chi},
                   {"dv_thresh", trace.config.dv_thresh},
                   {"margin_weight", trace.config.margin_weight},
                   {"delta_max", trace.config.delta_max},
                   {"gain", trace.config.gain},
                   {"speed_limit", trace.config.speed_limit},
                   {"coverage_grid", trace.config.coverage_grid},
                   {"seed", trace.config.seed},
                   {"trigger_enabled", trace.config.trigger_enabled}};
    nlohmann::json margins = nlohmann::json::array();
    for (int m = 0; m < trace.min_margins.rows(); ++m) {
      nlohmann::json row;
      row["task"] = m;
      for (int u = 0; u < trace.min_margins.cols(); ++u) {
        row["min_margin"][names.at(u)] = trace.min_margins(m, u);
      }
      margins.push_back(row);
    }
    j["min_margins"] = margins;
    // Wall-clock figures are the one non-deterministic block.
    nlohmann::json timing;
    timing["solve_wall_ms"] = trace.solve_wall_ms;
    double total = 0.0;
    for (double w : trace.solve_wall_ms) total += w;
    timing["total_solve_wall_ms"] = total;
    j["timing"] = timing;
    out << j.dump(2) << '\n';
  }
}

}  // namespace rta
