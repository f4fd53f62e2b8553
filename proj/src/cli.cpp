#include "rta/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "rta/allocator/instance_gen.hpp"
#include "rta/allocator/model.hpp"
#include "rta/allocator/solve.hpp"
#include "rta/sim/runner.hpp"
#include "rta/sim/scenario.hpp"
#include "rta/sim/trace.hpp"

namespace rta {

namespace {

using nlohmann::json;

std::string resolve_out_dir(const CommandSpec& spec) {
  if (spec.out_dir != "out") return spec.out_dir;
  if (const char* env = std::getenv("RTA_OUT_DIR")) return env;
  return spec.out_dir;
}

ScenarioConfig apply_overrides(ScenarioConfig cfg, const CommandSpec& spec) {
  if (spec.seed) cfg.seed = *spec.seed;
  if (spec.chi) cfg.chi = *spec.chi;
  if (spec.dv_thresh) cfg.dv_thresh = *spec.dv_thresh;
  if (spec.margin_weight) cfg.margin_weight = *spec.margin_weight;
  if (spec.delta_max) cfg.delta_max = *spec.delta_max;
  if (spec.dt) cfg.dt = *spec.dt;
  if (spec.duration) cfg.duration = *spec.duration;
  if (spec.no_trigger) cfg.trigger_enabled = false;
  cfg.validate();
  return cfg;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json int_matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json solution_to_json(const AllocationSolution& sol) {
  json j;
  j["feasible"] = sol.feasible;
  if (!sol.feasible) {
    j["infeasibility"] = sol.infeasibility;
    j["nodes"] = sol.stats.nodes;
    j["wall_ms"] = sol.stats.wall_ms;
    return j;
  }
  j["A"] = int_matrix_to_json(sol.A);
  json iota = json::array();
  for (const auto& i : sol.iota) {
    json row = json::array();
    for (int k = 0; k < i.size(); ++k) row.push_back(i(k));
    iota.push_back(std::move(row));
  }
  j["iota"] = iota;
  json phi = json::array();
  for (int m = 0; m < sol.phi.size(); ++m) phi.push_back(sol.phi(m));
  j["phi"] = phi;
  j["D"] = matrix_to_json(sol.D);
  j["objective"] = sol.objective;
  j["gap"] = sol.stats.gap;
  j["nodes"] = sol.stats.nodes;
  j["wall_ms"] = sol.stats.wall_ms;
  return j;
}

void write_trials(const TrialsSummary& summary, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "trials.csv");
    out << "t,worst_margin_with_realloc,worst_margin_allocate_once\n";
    for (std::size_t k = 0; k < summary.worst_with.size(); ++k) {
      out << (k + 1) * summary.dt << ',' << summary.worst_with[k] << ','
          << summary.worst_without[k] << '\n';
    }
  }
  json j;
  j["eps_fraction"] = summary.eps_fraction;
  j["trials"] = json::array();
  for (const auto& t : summary.trials) {
    double with_final = t.with_min_margin.empty() ? 0.0 : t.with_min_margin.back();
    double without_final =
        t.without_min_margin.empty() ? 0.0 : t.without_min_margin.back();
    j["trials"].push_back({{"seed", t.seed},
                           {"fault_times", t.fault_times},
                           {"with_solves", t.with_solves},
                           {"without_solves", t.without_solves},
                           {"with_final_min_margin", with_final},
                           {"without_final_min_margin", without_final}});
  }
  std::ofstream out(fs::path(out_dir) / "trials_summary.json");
  out << j.dump(2) << '\n';
}

}  // namespace

AllocationProblem parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read problem file " + path);
  json root = json::parse(in, nullptr, true, /*ignore_comments=*/true);

  AllocationProblem p;
  const json& team = root.at("team");
  const json& caps = team.at("capabilities");
  const json& species = team.at("species");
  const int U = static_cast<int>(caps.size());
  const int S = static_cast<int>(species.size());
  p.capabilities.Q = Matrix::Zero(S, U);
  p.deploy_costs = Vector::Zero(S);
  std::vector<int> ids;
  for (int s = 0; s < S; ++s) {
    const json& sp = species[s];
    p.capabilities.species_names.push_back(sp.at("name").get<std::string>());
    for (int u = 0; u < U; ++u) {
      p.capabilities.Q(s, u) = sp.at("capabilities").at(u).get<double>();
    }
    p.deploy_costs(s) = sp.value("deploy_cost", 0.1);
    int count = sp.at("count").get<int>();
    for (int i = 0; i < count; ++i) ids.push_back(s);
  }
  for (const auto& c : caps) {
    p.capabilities.capability_names.push_back(c.get<std::string>());
  }
  p.mapping = SpeciesMapping::from_species_ids(ids, S);
  if (team.contains("lambda")) {
    for (int s = 0; s < S; ++s) p.mapping.lambda(s) = team["lambda"].at(s).get<int>();
  }
  const int N = static_cast<int>(ids.size());

  const json& tasks = root.at("tasks");
  const int M = static_cast<int>(tasks.size());
  p.task_priorities = Vector::Zero(M);
  p.transition_costs = Vector::Zero(M);
  for (int m = 0; m < M; ++m) {
    const json& t = tasks[m];
    const json& req = t.at("requirements");
    Matrix y(req.size(), U);
    for (std::size_t k = 0; k < req.size(); ++k) {
      for (int u = 0; u < U; ++u) y(k, u) = req[k].at(u).get<double>();
    }
    p.requirements.push_back(std::move(y));
    p.task_priorities(m) = t.at("priority").get<double>();
    p.transition_costs(m) = t.at("transition_cost").get<double>();
  }

  p.degradation = Matrix::Zero(M, U);
  if (root.contains("degradation")) {
    for (int m = 0; m < M; ++m) {
      for (int u = 0; u < U; ++u) {
        p.degradation(m, u) = root["degradation"].at(m).at(u).get<double>();
      }
    }
  }
  p.previous_allocation = IntMatrix::Zero(M, N);
  if (root.contains("previous_allocation")) {
    for (int m = 0; m < M; ++m) {
      for (int i = 0; i < N; ++i) {
        p.previous_allocation(m, i) =
            root["previous_allocation"].at(m).at(i).get<int>();
      }
    }
  }
  p.discrepancies = Vector::Zero(N);
  if (root.contains("discrepancies")) {
    for (int i = 0; i < N; ++i) {
      p.discrepancies(i) = root["discrepancies"].at(i).get<double>();
    }
  }
  if (root.contains("params")) {
    const json& params = root["params"];
    p.margin_weight = params.value("margin_weight", p.margin_weight);
    p.delta_max = params.value("delta_max", p.delta_max);
    p.dv_thresh = params.value("dv_thresh", p.dv_thresh);
  }
  p.validate();
  return p;
}

int cmd_run(const CommandSpec& spec) {
  ScenarioConfig cfg;
  try {
    cfg = apply_overrides(load_scenario(spec.scenario), spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  std::string out_dir = resolve_out_dir(spec);

  if (spec.trials > 0) {
    RandomizeMode mode = RandomizeMode::none;
    if (spec.randomize == "env") {
      mode = RandomizeMode::env;
    } else if (spec.randomize == "params") {
      mode = RandomizeMode::params;
    } else if (!spec.randomize.empty() && spec.randomize != "none") {
      std::cerr << "config error: unknown randomize mode '" << spec.randomize
                << "'\n";
      return 1;
    }
    TrialsSummary summary = randomized_trials(cfg, spec.trials, mode);
    write_trials(summary, out_dir);
    std::cout << "ran " << spec.trials << " trials of " << cfg.name << " -> "
              << out_dir << "\n";
    return 0;
  }

  SimTrace trace = run_scenario(cfg);
  write_trace_files(trace, out_dir);
  std::cout << "scenario " << cfg.name << ": " << trace.ticks << " ticks, "
            << trace.solve_count << " allocation solve(s) -> " << out_dir
            << "\n";
  if (trace.initial_infeasible) {
    std::cerr << "allocator infeasible at t=0\n";
    return 2;
  }
  return 0;
}

int cmd_solve(const CommandSpec& spec) {
  AllocationProblem problem;
  try {
    problem = parse_problem_file(spec.problem_file);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  SolveSettings settings;
  settings.gap_tol = spec.gap_tol;
  settings.node_limit = spec.node_limit;
  AllocationSolution sol = solve(build_model(problem), settings);
  json out = solution_to_json(sol);
  if (spec.solution_out.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::ofstream f(spec.solution_out);
    f << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle_check(const CommandSpec& spec) {
  Rng rng(spec.oracle_seed);
  int mismatches = 0;
  int infeasible = 0;
  for (int k = 0; k < spec.instances; ++k) {
    Rng sub = rng.derive(k);
    AllocationProblem p = random_small_instance(sub);
    AllocationSolution oracle = enumerate_optimal(p);
    SolveSettings settings;
    settings.gap_tol = 1e-12;
    settings.corrupt_bound = spec.corrupt_bound;
    AllocationSolution sol = solve(build_model(p), settings);
    bool mismatch;
    if (!oracle.feasible || !sol.feasible) {
      mismatch = oracle.feasible != sol.feasible;
      infeasible += !oracle.feasible;
    } else {
      mismatch = std::abs(sol.objective - oracle.objective) > 1e-9;
    }
    if (mismatch) {
      ++mismatches;
      std::cout << "instance " << k << ": MISMATCH (oracle "
                << (oracle.feasible ? std::to_string(oracle.objective)
                                    : "infeasible")
                << ", solver "
                << (sol.feasible ? std::to_string(sol.objective)
                                 : "infeasible")
                << ")\n";
    }
  }
  std::cout << "oracle-check: " << spec.instances << " instances, "
            << mismatches << " mismatch(es), " << infeasible
            << " infeasible instance(s)\n";
  return 0;
}

int cmd_bench(const CommandSpec& spec) {
  if (spec.sizes.empty()) {
    std::cerr << "config error: bench needs at least one team size\n";
    return 1;
  }
  std::string out_dir = resolve_out_dir(spec);
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "bench.csv");
  out << "n_robots,repetitions,median_ms,stddev_ms,median_nodes,max_gap,"
         "node_limit_hit\n";
  for (int n : spec.sizes) {
    if (n < 1) {
      std::cerr << "config error: team sizes must be >= 1\n";
      return 1;
    }
    std::vector<double> wall, nodes;
    double max_gap = 0.0;
    bool limit_hit = false;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      Rng rng(1000 + 31 * n + rep);
      AllocationProblem p = scaled_benchmark_problem(n, rng);
      SolveSettings settings;
      settings.gap_tol = spec.gap_tol;
      settings.node_limit = spec.node_limit;
      AllocationSolution sol = solve(build_model(p), settings);
      wall.push_back(sol.stats.wall_ms);
      nodes.push_back(static_cast<double>(sol.stats.nodes));
      max_gap = std::max(max_gap, sol.stats.gap);
      if (sol.stats.nodes >= spec.node_limit) limit_hit = true;
    }
    auto median = [](std::vector<double> v) {
      if (v.empty()) return 0.0;
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    double med = median(wall);
    double mean = 0.0;
    for (double w : wall) mean += w;
    mean /= std::max<std::size_t>(1, wall.size());
    double var = 0.0;
    for (double w : wall) var += (w - mean) * (w - mean);
    var /= std::max<std::size_t>(1, wall.size());
    out << n << ',' << spec.repetitions << ',' << med << ','
        << std::sqrt(var) << ',' << median(nodes) << ',' << max_gap << ','
        << (limit_hit ? 1 : 0) << '\n';
    std::cout << "N=" << n << ": median " << med << " ms over "
              << spec.repetitions << " repetition(s)\n";
  }
  return 0;
}

int cmd_scenarios(const CommandSpec&) {
  for (const auto& [name, desc] : builtin_scenario_names()) {
    std::cout << name << "\n    " << desc << "\n";
  }
  return 0;
}

int dispatch(const CommandSpec& spec) {
  try {
    if (spec.subcommand == "run") return cmd_run(spec);
    if (spec.subcommand == "solve") return cmd_solve(spec);
    if (spec.subcommand == "oracle-check") return cmd_oracle_check(spec);
    if (spec.subcommand == "bench") return cmd_bench(spec);
    if (spec.subcommand == "scenarios") return cmd_scenarios(spec);
    std::cerr << "unknown subcommand '" << spec.subcommand << "'\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace rta
