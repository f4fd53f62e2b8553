#include "rta/sim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

#include "json.hpp"
#include "rta/allocator/model.hpp"
#include "rta/allocator/solve.hpp"
#include "rta/degradation.hpp"

namespace rta {

void apply_allocation(const AllocationSolution& solution,
                      std::vector<RobotState>& robots) {
  for (std::size_t i = 0; i < robots.size(); ++i) {
    int task = -1;
    for (int m = 0; m < solution.A.rows(); ++m) {
      if (solution.A(m, static_cast<int>(i)) != 0) task = m;
    }
    robots[i].task = task;
  }
}

namespace {

struct LoopState {
  std::vector<RobotState> robots;
  IntMatrix A;
  std::vector<IntVector> iota;
  IntVector phi;
  Vector dv_raw, dv_bar;
  std::vector<bool> crossed;
  DegradationState degradation;
};

AllocationProblem make_problem(const ScenarioConfig& config,
                               const CapabilityMatrix& Q,
                               const SpeciesMapping& P, const LoopState& st) {
  AllocationProblem p;
  p.capabilities = Q;
  p.mapping = P;
  const int M = config.num_tasks();
  p.requirements.reserve(M);
  p.task_priorities = Vector::Zero(M);
  p.transition_costs = Vector::Zero(M);
  for (int m = 0; m < M; ++m) {
    p.requirements.push_back(config.tasks[m].requirements);
    p.task_priorities(m) = config.tasks[m].priority;
    p.transition_costs(m) = config.tasks[m].transition_cost;
  }
  p.degradation = st.degradation.d();
  p.deploy_costs = Vector::Zero(config.num_species());
  for (int s = 0; s < config.num_species(); ++s) {
    p.deploy_costs(s) = config.species[s].deploy_cost;
  }
  p.previous_allocation = st.A;
  p.discrepancies = st.dv_bar;
  p.margin_weight = config.margin_weight;
  p.delta_max = config.delta_max;
  p.dv_thresh = config.dv_thresh;
  return p;
}

Vec2 clamp_speed(const Vec2& u, double limit) {
  double speed = u.norm();
  if (speed <= limit || speed == 0.0) return u;
  return u * (limit / speed);
}

// Debug hook: RTA_DUMP_PROBLEMS=<dir> writes every allocation problem the
// runner solves, in the `solve` subcommand's file format.
void maybe_dump_problem(const AllocationProblem& p, int tick) {
  const char* dir = std::getenv("RTA_DUMP_PROBLEMS");
  if (!dir) return;
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  nlohmann::json caps = nlohmann::json::array();
  for (const auto& name : p.capabilities.capability_names) caps.push_back(name);
  nlohmann::json species = nlohmann::json::array();
  IntVector counts = IntVector::Zero(p.num_species());
  for (int i = 0; i < p.num_robots(); ++i) counts(p.mapping.species_of(i)) += 1;
  for (int s = 0; s < p.num_species(); ++s) {
    nlohmann::json caps_row = nlohmann::json::array();
    for (int u = 0; u < p.num_capabilities(); ++u) {
      caps_row.push_back(p.capabilities.Q(s, u));
    }
    species.push_back({{"name", p.capabilities.species_names[s]},
                       {"capabilities", caps_row},
                       {"count", counts(s)},
                       {"deploy_cost", p.deploy_costs(s)}});
  }
  nlohmann::json lambda = nlohmann::json::array();
  for (int s = 0; s < p.num_species(); ++s) lambda.push_back(p.mapping.lambda(s));
  j["team"] = {{"capabilities", caps}, {"species", species}, {"lambda", lambda}};
  nlohmann::json tasks = nlohmann::json::array();
  for (int m = 0; m < p.num_tasks(); ++m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k < p.requirements[m].rows(); ++k) {
      nlohmann::json row = nlohmann::json::array();
      for (int u = 0; u < p.num_capabilities(); ++u) {
        row.push_back(p.requirements[m](k, u));
      }
      rows.push_back(row);
    }
    tasks.push_back({{"requirements", rows},
                     {"priority", p.task_priorities(m)},
                     {"transition_cost", p.transition_costs(m)}});
  }
  j["tasks"] = tasks;
  nlohmann::json deg = nlohmann::json::array();
  nlohmann::json prev = nlohmann::json::array();
  for (int m = 0; m < p.num_tasks(); ++m) {
    nlohmann::json drow = nlohmann::json::array();
    nlohmann::json arow = nlohmann::json::array();
    for (int u = 0; u < p.num_capabilities(); ++u) drow.push_back(p.degradation(m, u));
    for (int i = 0; i < p.num_robots(); ++i) arow.push_back(p.previous_allocation(m, i));
    deg.push_back(drow);
    prev.push_back(arow);
  }
  j["degradation"] = deg;
  j["previous_allocation"] = prev;
  nlohmann::json dv = nlohmann::json::array();
  for (int i = 0; i < p.num_robots(); ++i) dv.push_back(p.discrepancies(i));
  j["discrepancies"] = dv;
  j["params"] = {{"margin_weight", p.margin_weight},
                 {"delta_max", p.delta_max},
                 {"dv_thresh", p.dv_thresh}};
  std::ofstream out(std::filesystem::path(dir) /
                    ("problem_tick" + std::to_string(tick) + ".json"));
  out << j.dump(2) << "\n";
}

}  // namespace

SimTrace run_scenario(const ScenarioConfig& config) {
  config.validate();
  SimTrace trace;
  trace.config = config;

  const int N = config.num_robots();
  const int M = config.num_tasks();
  const int U = config.num_capabilities();
  const CapabilityMatrix Q = config.capability_matrix();
  const SpeciesMapping P = config.species_mapping();
  const IntMatrix Q_bar = binary_shadow(Q.Q);

  LoopState st;
  st.robots.resize(N);
  Rng spawn_rng = Rng(config.seed).derive(17);
  for (int i = 0; i < N; ++i) {
    st.robots[i].species = config.species_of(i);
    Vec2 pos = config.positions
                   ? (*config.positions)[i]
                   : Vec2(spawn_rng.uniform(config.spawn.lo.x(),
                                            config.spawn.hi.x()),
                          spawn_rng.uniform(config.spawn.lo.y(),
                                            config.spawn.hi.y()));
    st.robots[i].x = pos;
    st.robots[i].home = pos;
  }
  st.A = IntMatrix::Zero(M, N);
  st.iota.resize(M);
  st.phi = IntVector::Zero(M);
  for (int m = 0; m < M; ++m) {
    st.iota[m] =
        IntVector::Zero(config.tasks[m].requirements.rows());
    st.iota[m](0) = 1;
  }
  st.dv_raw = Vector::Zero(N);
  st.dv_bar = Vector::Zero(N);
  st.crossed.assign(N, false);
  st.degradation = DegradationState(M, U);

  trace.min_margins =
      Matrix::Constant(M, U, std::numeric_limits<double>::infinity());

  auto emit = [&](int tick, const std::string& type, nlohmann::json data) {
    trace.events.push_back({tick, tick * config.dt, type, std::move(data)});
  };

  auto run_solver = [&](int tick, bool initial) {
    AllocationProblem problem = make_problem(config, Q, P, st);
    maybe_dump_problem(problem, tick);
    SolveSettings settings;
    settings.gap_tol = config.gap_tol;
    settings.node_limit = config.node_limit;
    AllocationSolution sol = solve(build_model(problem), settings);
    ++trace.solve_count;
    trace.solve_wall_ms.push_back(sol.stats.wall_ms);
    emit(tick, "miqp_solved",
         {{"feasible", sol.feasible},
          {"objective", sol.feasible ? sol.objective : 0.0},
          {"nodes", sol.stats.nodes},
          {"gap", sol.feasible ? sol.stats.gap : -1.0}});
    if (!sol.feasible) {
      if (initial) trace.initial_infeasible = true;
      emit(tick, "allocator_infeasible", {{"reason", sol.infeasibility}});
      return;  // degrade, don't crash: keep the previous allocation
    }

    nlohmann::json moves = nlohmann::json::array();
    for (int i = 0; i < N; ++i) {
      int from = -1, to = -1;
      for (int m = 0; m < M; ++m) {
        if (st.A(m, i)) from = m;
        if (sol.A(m, i)) to = m;
      }
      if (from == to) continue;
      double cost_from = from >= 0 ? config.tasks[from].transition_cost : 0.0;
      double cost_to = to >= 0 ? config.tasks[to].transition_cost : 0.0;
      nlohmann::json move = {{"robot", i},
                             {"from", from},
                             {"to", to},
                             {"cost", std::abs(cost_to - cost_from)}};
      emit(tick, "reassigned", move);
      moves.push_back(std::move(move));
    }
    for (int m = 0; m < M; ++m) {
      int old_k = 0, new_k = 0;
      for (int k = 0; k < st.iota[m].size(); ++k) {
        if (st.iota[m](k)) old_k = k;
      }
      for (int k = 0; k < sol.iota[m].size(); ++k) {
        if (sol.iota[m](k)) new_k = k;
      }
      if (old_k != new_k) {
        emit(tick, "configuration_switched",
             {{"task", m}, {"from", old_k}, {"to", new_k}});
      }
      if (sol.phi(m) && !st.phi(m)) {
        emit(tick, "task_relaxed", {{"task", m}});
      }
    }
    if (!moves.empty()) {
      emit(tick, "allocation_applied", {{"moves", moves}});
    }
    st.A = sol.A;
    st.iota = sol.iota;
    st.phi = sol.phi;
    apply_allocation(sol, st.robots);
    st.degradation.on_solved(tick);
  };

  run_solver(0, true);

  const int ticks = static_cast<int>(std::llround(config.duration / config.dt));
  trace.ticks = ticks;
  trace.robot_rows.reserve(static_cast<std::size_t>(ticks) * N);
  trace.degradation_rows.reserve(static_cast<std::size_t>(ticks) * M * U);
  trace.margin_rows.reserve(static_cast<std::size_t>(ticks) * M * U);
  trace.selected_config.reserve(ticks);

  std::vector<TaskContext> ctx(M);
  std::vector<Vec2> commanded(N);
  std::vector<double> v_prev(N), v_pred(N);
  Matrix d_star_log = Matrix::Zero(M, U);

  for (int tick = 0; tick < ticks; ++tick) {
    const double t = tick * config.dt;
    const double t_next = (tick + 1) * config.dt;

    // Membership and frozen coverage targets for the tick.
    for (int m = 0; m < M; ++m) {
      ctx[m].time = t;
      ctx[m].members.clear();
      ctx[m].coverage_targets.clear();
      for (int i = 0; i < N; ++i) {
        if (st.A(m, i)) ctx[m].members.push_back(i);
      }
      if (config.tasks[m].kind == TaskKind::coverage &&
          !ctx[m].members.empty()) {
        CoverageDomain domain = config.tasks[m].domain;
        domain.grid = config.coverage_grid;
        std::vector<Vec2> positions;
        for (int i : ctx[m].members) positions.push_back(st.robots[i].x);
        auto targets = coverage_targets(positions, domain);
        for (std::size_t k = 0; k < targets.size(); ++k) {
          ctx[m].coverage_targets[ctx[m].members[k]] = targets[k];
        }
      }
    }

    // Commanded velocities: gradient controllers for allocated robots, the
    // homing controller for idle ones, all under the actuator speed limit.
    std::unordered_map<int, Vec2> commanded_map;
    for (int i = 0; i < N; ++i) {
      int m = st.robots[i].task;
      Vec2 u = m >= 0 ? gradient_controller(config.tasks[m], i, st.robots,
                                            ctx[m], config.gain)
                      : Vec2(-config.gain * (st.robots[i].x - st.robots[i].home));
      commanded[i] = clamp_speed(u, config.speed_limit);
      commanded_map.emplace(i, commanded[i]);
    }

    for (int m = 0; m < M; ++m) {
      for (int i : ctx[m].members) {
        v_prev[i] = robot_task_value(config.tasks[m], i, st.robots, ctx[m]);
        v_pred[i] = predicted_task_value(config.tasks[m], i, st.robots, ctx[m],
                                         commanded_map, config.dt);
      }
    }

    for (int i = 0; i < N; ++i) {
      st.robots[i] = step_dynamics(st.robots[i], i, commanded[i],
                                   config.disturbances, t, config.dt);
    }

    // Measure against the same membership and coverage targets, one step on.
    for (int m = 0; m < M; ++m) {
      TaskContext next_ctx = ctx[m];
      next_ctx.time = t_next;
      Vector dv_members(static_cast<int>(ctx[m].members.size()));
      int idx = 0;
      for (int i : ctx[m].members) {
        double v_meas =
            robot_task_value(config.tasks[m], i, st.robots, next_ctx);
        st.dv_raw(i) = task_discrepancy(v_prev[i], v_meas, v_pred[i]);
        st.dv_bar(i) =
            smooth_discrepancy(st.dv_bar(i), st.dv_raw(i), config.dt);
        dv_members(idx++) = st.dv_raw(i);
      }

      // Species-and-capability attribution of the task's discrepancies.
      std::vector<int> present_species;
      for (int s = 0; s < P.num_species(); ++s) {
        for (int i : ctx[m].members) {
          if (st.robots[i].species == s) {
            present_species.push_back(s);
            break;
          }
        }
      }
      Vector d_star = Vector::Zero(U);
      IntVector theta = IntVector::Zero(U);
      if (!present_species.empty()) {
        IntMatrix p_sub(static_cast<int>(present_species.size()),
                        static_cast<int>(ctx[m].members.size()));
        IntMatrix q_sub(static_cast<int>(present_species.size()), U);
        for (std::size_t r = 0; r < present_species.size(); ++r) {
          for (std::size_t c = 0; c < ctx[m].members.size(); ++c) {
            p_sub(r, c) =
                st.robots[ctx[m].members[c]].species == present_species[r];
          }
          q_sub.row(r) = Q_bar.row(present_species[r]);
        }
        d_star = instantaneous_degradation(dv_members, p_sub, q_sub);
        theta = capability_indicator(q_sub);
      }
      d_star_log.row(m) = d_star.transpose();
      st.degradation.update_task(m, d_star, theta, config.dt);
    }
    for (int i = 0; i < N; ++i) {
      if (st.robots[i].task < 0) st.dv_raw(i) = 0.0;  // idle: dv_bar held
    }

    // Logging at the post-step timestamp.
    for (int i = 0; i < N; ++i) {
      trace.robot_rows.push_back({tick + 1, t_next, i, st.robots[i].x.x(),
                                  st.robots[i].x.y(), st.robots[i].task,
                                  st.dv_raw(i), st.dv_bar(i)});
    }
    AllocationProblem live = make_problem(config, Q, P, st);
    Matrix D = margins(st.A, st.iota, live);
    std::vector<int> selected(M, 0);
    for (int m = 0; m < M; ++m) {
      for (int k = 0; k < st.iota[m].size(); ++k) {
        if (st.iota[m](k)) selected[m] = k;
      }
      for (int u = 0; u < U; ++u) {
        trace.degradation_rows.push_back(
            {tick + 1, t_next, m, u, st.degradation.d()(m, u),
             d_star_log(m, u)});
        trace.margin_rows.push_back({tick + 1, t_next, m, u, D(m, u)});
        trace.min_margins(m, u) = std::min(trace.min_margins(m, u), D(m, u));
      }
    }
    trace.selected_config.push_back(std::move(selected));

    // Reallocation trigger: degradation change since the last solve, plus a
    // solve whenever a robot first crosses the discrepancy threshold.
    if (config.trigger_enabled) {
      nlohmann::json reasons = nlohmann::json::array();
      if (st.degradation.should_trigger(config.chi)) {
        reasons.push_back("degradation_change");
      }
      for (int i = 0; i < N; ++i) {
        if (!st.crossed[i] && st.robots[i].task >= 0 &&
            st.dv_bar(i) > config.dv_thresh) {
          st.crossed[i] = true;
          reasons.push_back("discrepancy_threshold");
          emit(tick + 1, "robot_over_threshold",
               {{"robot", i}, {"dv_smoothed", st.dv_bar(i)}});
        }
      }
      if (!reasons.empty()) {
        emit(tick + 1, "trigger_fired", {{"reasons", reasons}});
        run_solver(tick + 1, false);
      }
    }
  }

  trace.final_A = st.A;
  trace.final_iota = st.iota;
  trace.final_phi = st.phi;
  return trace;
}

void tracking_margin_series(const SimTrace& trace, double eps_fraction,
                            std::vector<double>& raw,
                            std::vector<double>& with_eps) {
  const int M = trace.config.num_tasks();
  const int U = trace.config.num_capabilities();
  raw.assign(trace.ticks, std::numeric_limits<double>::infinity());
  with_eps.assign(trace.ticks, std::numeric_limits<double>::infinity());
  for (int tick = 1; tick <= trace.ticks; ++tick) {
    for (int m = 0; m < M; ++m) {
      if (trace.config.tasks[m].kind != TaskKind::target_tracking) continue;
      int k = trace.selected_config[tick - 1][m];
      for (int u = 0; u < U; ++u) {
        double margin = trace.margin_at(tick, m, u);
        double req = trace.config.tasks[m].requirements(k, u);
        raw[tick - 1] = std::min(raw[tick - 1], margin);
        with_eps[tick - 1] =
            std::min(with_eps[tick - 1], margin + eps_fraction * req);
      }
    }
  }
}

ScenarioConfig randomize_scenario(const ScenarioConfig& base, int trial,
                                  RandomizeMode mode) {
  ScenarioConfig cfg = base;
  Rng rng = Rng(base.seed).derive(9000 + trial);
  cfg.seed = rng.next_u64();
  if (mode == RandomizeMode::none || trial == 0) return cfg;

  if (mode == RandomizeMode::env) {
    // Disturbance timing, target schedules, and initial positions.
    for (auto& d : cfg.disturbances) {
      double shift = rng.uniform(-0.2, 0.3) * std::max(d.t_start, 1.0);
      d.t_start += shift;
      if (std::isfinite(d.t_end)) d.t_end += shift;
    }
    for (auto& task : cfg.tasks) {
      double stretch = rng.uniform(0.8, 1.25);
      for (auto& w : task.target.waypoints) w.t *= stretch;
    }
    cfg.positions.reset();  // respawn from the box with the trial seed
  } else if (mode == RandomizeMode::params) {
    auto perturb = [&](double v, double lo, double hi) {
      return std::clamp(v + 0.4 * std::abs(v) * rng.normal(), lo, hi);
    };
    for (auto& s : cfg.species) {
      s.deploy_cost = perturb(s.deploy_cost, 0.0, 1e9);
    }
    for (auto& t : cfg.tasks) {
      t.priority = perturb(t.priority, 0.0, 1e9);
      t.transition_cost = perturb(t.transition_cost, 0.0, 1e9);
    }
    cfg.delta_max = perturb(cfg.delta_max, 1.0, 1e9);
    cfg.margin_weight = perturb(cfg.margin_weight, 0.01, 1e9);
    cfg.chi = perturb(cfg.chi, 0.05, 1.0);
  }
  return cfg;
}

TrialsSummary randomized_trials(const ScenarioConfig& base, int n_trials,
                                RandomizeMode mode, double eps_fraction) {
  TrialsSummary summary;
  summary.eps_fraction = eps_fraction;
  summary.dt = base.dt;
  if (n_trials < 1) return summary;

  auto run_trial = [&](int trial) {
    ScenarioConfig cfg = randomize_scenario(base, trial, mode);
    TrialSeries series;
    series.seed = cfg.seed;
    for (const auto& d : cfg.disturbances) {
      series.fault_times.push_back(d.t_start);
    }
    ScenarioConfig with_cfg = cfg;
    with_cfg.trigger_enabled = true;
    SimTrace with_trace = run_scenario(with_cfg);
    series.with_solves = with_trace.solve_count;
    tracking_margin_series(with_trace, eps_fraction, series.with_min_margin,
                           series.with_min_margin_eps);

    ScenarioConfig without_cfg = cfg;
    without_cfg.trigger_enabled = false;
    SimTrace without_trace = run_scenario(without_cfg);
    series.without_solves = without_trace.solve_count;
    tracking_margin_series(without_trace, eps_fraction,
                           series.without_min_margin,
                           series.without_min_margin_eps);
    return series;
  };

  std::vector<std::future<TrialSeries>> futures;
  futures.reserve(n_trials);
  for (int trial = 0; trial < n_trials; ++trial) {
    futures.push_back(
        std::async(std::launch::async, run_trial, trial));
  }
  for (auto& f : futures) summary.trials.push_back(f.get());

  std::size_t ticks = 0;
  for (const auto& t : summary.trials) {
    ticks = std::max(ticks, t.with_min_margin.size());
  }
  summary.worst_with.assign(ticks, std::numeric_limits<double>::infinity());
  summary.worst_without.assign(ticks, std::numeric_limits<double>::infinity());
  for (const auto& t : summary.trials) {
    for (std::size_t k = 0; k < t.with_min_margin.size(); ++k) {
      summary.worst_with[k] = std::min(summary.worst_with[k],
                                       t.with_min_margin[k]);
    }
    for (std::size_t k = 0; k < t.without_min_margin.size(); ++k) {
      summary.worst_without[k] =
          std::min(summary.worst_without[k], t.without_min_margin[k]);
    }
  }
  return summary;
}

}  // namespace rta
