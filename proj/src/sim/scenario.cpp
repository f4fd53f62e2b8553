#include "rta/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rta {

using nlohmann::json;

int ScenarioConfig::num_robots() const {
  int n = 0;
  for (const auto& s : species) n += s.count;
  return n;
}

CapabilityMatrix ScenarioConfig::capability_matrix() const {
  CapabilityMatrix q;
  q.Q = Matrix::Zero(num_species(), num_capabilities());
  for (int s = 0; s < num_species(); ++s) {
    q.Q.row(s) = species[s].capabilities.transpose();
  }
  q.capability_names = capability_names;
  for (const auto& s : species) q.species_names.push_back(s.name);
  return q;
}

int ScenarioConfig::species_of(int robot) const {
  int acc = 0;
  for (int s = 0; s < num_species(); ++s) {
    acc += species[s].count;
    if (robot < acc) return s;
  }
  return -1;
}

SpeciesMapping ScenarioConfig::species_mapping() const {
  std::vector<int> ids(num_robots());
  for (int i = 0; i < num_robots(); ++i) ids[i] = species_of(i);
  SpeciesMapping m = SpeciesMapping::from_species_ids(ids, num_species());
  if (lambda) m.lambda = *lambda;
  return m;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& what) {
    throw std::invalid_argument("scenario." + field + ": " + what);
  };
  if (capability_names.empty()) fail("team.capabilities", "must be non-empty");
  if (species.empty()) fail("team.species", "must be non-empty");
  for (std::size_t s = 0; s < species.size(); ++s) {
    const auto& sp = species[s];
    std::string path = "team.species[" + std::to_string(s) + "]";
    if (sp.capabilities.size() != num_capabilities()) {
      fail(path + ".capabilities", "length must match team.capabilities");
    }
    if (sp.capabilities.minCoeff() < 0.0) {
      fail(path + ".capabilities", "entries must be nonnegative");
    }
    if (sp.count < 0) fail(path + ".count", "must be nonnegative");
    if (sp.deploy_cost < 0.0) fail(path + ".deploy_cost", "must be nonnegative");
  }
  if (lambda && lambda->size() != num_species()) {
    fail("team.lambda", "length must match the species list");
  }
  if (tasks.empty()) fail("tasks", "must be non-empty");
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    const auto& t = tasks[m];
    std::string path = "tasks[" + std::to_string(m) + "]";
    if (t.requirements.rows() < 1 ||
        t.requirements.cols() != num_capabilities()) {
      fail(path + ".requirements",
           "needs at least one row and one column per capability");
    }
    if (t.requirements.minCoeff() < 0.0) {
      fail(path + ".requirements", "entries must be nonnegative");
    }
    if (t.priority < 0.0) fail(path + ".priority", "must be nonnegative");
    if (t.transition_cost < 0.0) {
      fail(path + ".transition_cost", "must be nonnegative");
    }
    if (t.kind == TaskKind::follower && t.follow_distance <= 0.0) {
      fail(path + ".follow_distance", "must be positive");
    }
    if (t.kind == TaskKind::target_tracking && t.spacing <= 0.0) {
      fail(path + ".spacing", "must be positive");
    }
  }
  if (positions && static_cast<int>(positions->size()) != num_robots()) {
    fail("robots.positions", "length must equal the total robot count");
  }
  for (std::size_t d = 0; d < disturbances.size(); ++d) {
    const auto& spec = disturbances[d];
    std::string path = "disturbances[" + std::to_string(d) + "]";
    if (spec.kind != DisturbanceKind::sensing_fog &&
        (spec.magnitude < 0.0 || spec.magnitude > 1.0)) {
      fail(path + ".w", "control multiplier must lie in [0,1]");
    }
    if (spec.t_end < spec.t_start) fail(path + ".t_end", "must be >= t_start");
    if (spec.task_id >= num_tasks()) fail(path + ".task", "no such task");
    for (int id : spec.robot_ids) {
      if (id < 0 || id >= num_robots()) fail(path + ".robots", "no such robot");
    }
  }
  if (dt <= 0.0) fail("sim.dt", "must be positive");
  if (duration < dt) fail("sim.duration", "must cover at least one step");
  if (chi <= 0.0 || chi > 1.0) fail("sim.chi", "must lie in (0,1]");
  if (dv_thresh < 0.0 || dv_thresh > 1.0) {
    fail("sim.dv_thresh", "must lie in [0,1]");
  }
  if (margin_weight < 0.0) fail("sim.margin_weight", "must be nonnegative");
  if (delta_max <= 0.0) fail("sim.delta_max", "must be positive");
  if (gain <= 0.0) fail("sim.gain", "must be positive");
  if (speed_limit <= 0.0) fail("sim.speed_limit", "must be positive");
  if (coverage_grid < 4) fail("sim.coverage_grid", "must be at least 4");
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const std::string& path,
                             const std::string& what) {
  throw std::invalid_argument(origin + ": field '" + path + "': " + what);
}

const json& member(const json& j, const char* key, const std::string& origin,
                   const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) parse_fail(origin, path + "." + key, "missing");
  return *it;
}

double number_field(const json& j, const char* key, const std::string& origin,
                    const std::string& path) {
  const json& v = member(j, key, origin, path);
  if (!v.is_number()) parse_fail(origin, path + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback,
                 const std::string& origin, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) parse_fail(origin, path + "." + key, "expected a number");
  return it->get<double>();
}

Vec2 vec2_field(const json& v, const std::string& origin,
                const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    parse_fail(origin, path, "expected [x, y]");
  }
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

Trajectory trajectory_field(const json& v, const std::string& origin,
                            const std::string& path) {
  Trajectory tr;
  if (v.is_array() && v.size() == 2 && v[0].is_number()) {
    tr.waypoints.push_back({0.0, vec2_field(v, origin, path)});
    return tr;
  }
  if (!v.is_array() || v.empty()) {
    parse_fail(origin, path, "expected [x, y] or a list of [t, x, y]");
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    const json& w = v[k];
    std::string wp = path + "[" + std::to_string(k) + "]";
    if (!w.is_array() || w.size() != 3) parse_fail(origin, wp, "expected [t, x, y]");
    tr.waypoints.push_back(
        {w[0].get<double>(), Vec2(w[1].get<double>(), w[2].get<double>())});
  }
  for (std::size_t k = 1; k < tr.waypoints.size(); ++k) {
    if (tr.waypoints[k].t < tr.waypoints[k - 1].t) {
      parse_fail(origin, path, "waypoint times must be nondecreasing");
    }
  }
  return tr;
}

Region region_field(const json& v, const std::string& origin,
                    const std::string& path) {
  Region r;
  r.lo = vec2_field(member(v, "lo", origin, path), origin, path + ".lo");
  r.hi = vec2_field(member(v, "hi", origin, path), origin, path + ".hi");
  return r;
}

ScenarioConfig parse_scenario_json(const json& root,
                                   const std::string& origin) {
  ScenarioConfig cfg;
  if (root.contains("name")) cfg.name = root["name"].get<std::string>();

  const json& team = member(root, "team", origin, "scenario");
  for (const auto& c :
       member(team, "capabilities", origin, "team")) {
    cfg.capability_names.push_back(c.get<std::string>());
  }
  const json& species = member(team, "species", origin, "team");
  for (std::size_t s = 0; s < species.size(); ++s) {
    std::string path = "team.species[" + std::to_string(s) + "]";
    const json& sp = species[s];
    SpeciesSpec spec;
    spec.name = member(sp, "name", origin, path).get<std::string>();
    const json& caps = member(sp, "capabilities", origin, path);
    spec.capabilities = Vector::Zero(caps.size());
    for (std::size_t u = 0; u < caps.size(); ++u) {
      spec.capabilities(u) = caps[u].get<double>();
    }
    spec.count = static_cast<int>(number_field(sp, "count", origin, path));
    spec.deploy_cost = number_or(sp, "deploy_cost", 0.1, origin, path);
    cfg.species.push_back(std::move(spec));
  }
  if (team.contains("lambda")) {
    const json& lam = team["lambda"];
    IntVector l(lam.size());
    for (std::size_t s = 0; s < lam.size(); ++s) l(s) = lam[s].get<int>();
    cfg.lambda = l;
  }

  const json& tasks = member(root, "tasks", origin, "scenario");
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    std::string path = "tasks[" + std::to_string(m) + "]";
    const json& t = tasks[m];
    TaskDefinition task;
    task.name = member(t, "name", origin, path).get<std::string>();
    std::string kind = member(t, "kind", origin, path).get<std::string>();
    auto parsed_kind = task_kind_from_string(kind);
    if (!parsed_kind) parse_fail(origin, path + ".kind", "unknown kind '" + kind + "'");
    task.kind = *parsed_kind;
    if (task.kind == TaskKind::goal_tracking || task.kind == TaskKind::follower) {
      task.goal = trajectory_field(member(t, "goal", origin, path), origin,
                                   path + ".goal");
      task.follow_distance = number_or(t, "follow_distance", 1.0, origin, path);
    }
    if (task.kind == TaskKind::target_tracking) {
      task.target = trajectory_field(member(t, "target", origin, path), origin,
                                     path + ".target");
      task.tracking_distance_sq =
          number_field(t, "tracking_distance_sq", origin, path);
      task.spacing = number_or(t, "spacing", 1.0, origin, path);
    }
    if (task.kind == TaskKind::coverage) {
      const json& dom = member(t, "domain", origin, path);
      task.domain.lo =
          vec2_field(member(dom, "lo", origin, path), origin, path + ".domain.lo");
      task.domain.hi =
          vec2_field(member(dom, "hi", origin, path), origin, path + ".domain.hi");
      if (dom.contains("center")) {
        task.domain.center = vec2_field(dom["center"], origin, path + ".domain.center");
      }
      task.domain.sigma = number_or(dom, "sigma", 0.0, origin, path + ".domain");
    }
    const json& req = member(t, "requirements", origin, path);
    if (!req.is_array() || req.empty()) {
      parse_fail(origin, path + ".requirements", "expected a list of rows");
    }
    task.requirements =
        Matrix::Zero(req.size(), cfg.capability_names.size());
    for (std::size_t k = 0; k < req.size(); ++k) {
      if (req[k].size() != cfg.capability_names.size()) {
        parse_fail(origin,
                   path + ".requirements[" + std::to_string(k) + "]",
                   "row length must match team.capabilities");
      }
      for (std::size_t u = 0; u < req[k].size(); ++u) {
        task.requirements(k, u) = req[k][u].get<double>();
      }
    }
    task.priority = number_field(t, "priority", origin, path);
    task.transition_cost = number_field(t, "transition_cost", origin, path);
    cfg.tasks.push_back(std::move(task));
  }

  if (root.contains("robots")) {
    const json& robots = root["robots"];
    if (robots.contains("positions")) {
      std::vector<Vec2> positions;
      for (std::size_t i = 0; i < robots["positions"].size(); ++i) {
        positions.push_back(vec2_field(robots["positions"][i], origin,
                                       "robots.positions[" +
                                           std::to_string(i) + "]"));
      }
      cfg.positions = std::move(positions);
    }
    if (robots.contains("spawn")) {
      cfg.spawn = region_field(robots["spawn"], origin, "robots.spawn");
    }
  }

  if (root.contains("disturbances")) {
    const json& list = root["disturbances"];
    for (std::size_t d = 0; d < list.size(); ++d) {
      std::string path = "disturbances[" + std::to_string(d) + "]";
      const json& spec = list[d];
      DisturbanceSpec out;
      std::string kind = member(spec, "kind", origin, path).get<std::string>();
      if (kind == "control_multiplier") {
        out.kind = DisturbanceKind::control_multiplier;
        out.magnitude = number_field(spec, "w", origin, path);
      } else if (kind == "friction_zone") {
        out.kind = DisturbanceKind::friction_zone;
        out.magnitude = number_field(spec, "w", origin, path);
      } else if (kind == "sensing_fog") {
        out.kind = DisturbanceKind::sensing_fog;
        out.magnitude = number_field(spec, "rate", origin, path);
      } else {
        parse_fail(origin, path + ".kind", "unknown kind '" + kind + "'");
      }
      out.t_start = number_or(spec, "t_start", 0.0, origin, path);
      out.t_end = number_or(spec, "t_end",
                            std::numeric_limits<double>::infinity(), origin,
                            path);
      out.ramp = number_or(spec, "ramp", 0.0, origin, path);
      if (spec.contains("region")) {
        out.region = region_field(spec["region"], origin, path + ".region");
      }
      if (spec.contains("task")) out.task_id = spec["task"].get<int>();
      if (spec.contains("robots")) {
        for (const auto& id : spec["robots"]) {
          out.robot_ids.push_back(id.get<int>());
        }
      }
      cfg.disturbances.push_back(std::move(out));
    }
  }

  const json& sim = member(root, "sim", origin, "scenario");
  cfg.dt = number_or(sim, "dt", cfg.dt, origin, "sim");
  cfg.duration = number_or(sim, "duration", cfg.duration, origin, "sim");
  cfg.chi = number_or(sim, "chi", cfg.chi, origin, "sim");
  cfg.dv_thresh = number_or(sim, "dv_thresh", cfg.dv_thresh, origin, "sim");
  cfg.margin_weight =
      number_or(sim, "margin_weight", cfg.margin_weight, origin, "sim");
  cfg.delta_max = number_or(sim, "delta_max", cfg.delta_max, origin, "sim");
  cfg.gain = number_or(sim, "gain", cfg.gain, origin, "sim");
  cfg.speed_limit =
      number_or(sim, "speed_limit", cfg.speed_limit, origin, "sim");
  cfg.coverage_grid = static_cast<int>(
      number_or(sim, "coverage_grid", cfg.coverage_grid, origin, "sim"));
  if (sim.contains("seed")) cfg.seed = sim["seed"].get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  return parse_scenario_json(root, origin);
}

ScenarioConfig load_scenario(const std::string& name_or_path) {
  for (const auto& [name, desc] : builtin_scenario_names()) {
    if (name == name_or_path) return builtin_scenario(name);
  }
  std::ifstream in(name_or_path);
  if (!in) {
    throw std::invalid_argument("scenario '" + name_or_path +
                                "' is neither a builtin name nor a readable "
                                "file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), name_or_path);
}

namespace {

// Leader-follower pair from the discrepancy and degradation examples: a
// ground leader driving to a goal and an aerial follower keeping distance,
// with a head wind ramping onto the follower at t = 0.66 s.
ScenarioConfig leader_follower_scenario(const std::string& name,
                                        double duration) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.capability_names = {"perception", "ground_mobility", "aerial_mobility"};
  SpeciesSpec ground{"ground", Vector(3), 1, 0.1};
  ground.capabilities << 10, 2, 0;
  SpeciesSpec aerial{"aerial", Vector(3), 1, 0.1};
  aerial.capabilities << 10, 0, 5;
  cfg.species = {ground, aerial};

  TaskDefinition task;
  task.name = "leader_follower";
  task.kind = TaskKind::follower;
  task.goal.waypoints = {{0.0, Vec2(1.9, 0.0)}, {0.5, Vec2(2.0, 0.0)}};
  task.follow_distance = 1.0;
  task.requirements = Matrix(1, 3);
  task.requirements << 20, 2, 5;
  task.priority = 100.0;
  task.transition_cost = 1.0;
  cfg.tasks = {task};

  DisturbanceSpec wind;
  wind.kind = DisturbanceKind::control_multiplier;
  wind.magnitude = 0.3;
  wind.t_start = 0.66;
  wind.ramp = 0.5;
  wind.robot_ids = {1};
  cfg.disturbances = {wind};

  cfg.positions = std::vector<Vec2>{Vec2(0.0, 0.0), Vec2(-3.0, 0.0)};
  cfg.dt = 0.01;
  cfg.duration = duration;
  cfg.gain = 1.0;
  cfg.speed_limit = 5.0;
  cfg.chi = 0.33;
  cfg.dv_thresh = 0.9;
  return cfg;
}

Trajectory fixed_target(double x, double y) {
  return Trajectory::fixed(Vec2(x, y));
}

// Circular tour as a dense waypoint schedule: hold at the center offset
// until t_start, then loop with the given period.
Trajectory touring_target(const Vec2& center, double radius, double t_start,
                          double period, double t_end) {
  Trajectory tr;
  tr.waypoints.push_back({0.0, center + Vec2(radius, 0.0)});
  if (t_start > 0.0) tr.waypoints.push_back({t_start, center + Vec2(radius, 0.0)});
  const int segments_per_lap = 24;
  double t = t_start;
  int k = 0;
  while (t < t_end) {
    ++k;
    t = t_start + k * period / segments_per_lap;
    double angle = 2.0 * M_PI * k / segments_per_lap;
    tr.waypoints.push_back(
        {t, center + radius * Vec2(std::cos(angle), std::sin(angle))});
  }
  return tr;
}

// The coverage and target-tracking experiment. Aerial and ground species,
// two tracking tasks with a two-configuration requirement matrix, and a
// Gaussian-weighted monitoring task. An ice patch immobilizes the ground
// robot serving target 2 once that target starts touring, and a later fog
// bank over task 2 degrades tracking quality until the allocator sacrifices
// the monitoring task.
ScenarioConfig coverage_tracking_scenario(int n_aerial, int n_ground,
                                          double requirement_scale,
                                          const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.capability_names = {"perception", "resolution", "airspeed",
                          "groundspeed", "comm_rate"};
  SpeciesSpec aerial{"aerial", Vector(5), n_aerial, 0.1};
  aerial.capabilities << 5, 1, 3, 0, 5;
  SpeciesSpec ground{"ground", Vector(5), n_ground, 0.1};
  ground.capabilities << 2, 3, 0, 1, 8;
  cfg.species = {aerial, ground};
  // Two ground robots may deploy at a time; the rest are reserve stock.
  IntVector lambda(2);
  lambda << n_aerial, 2;
  cfg.lambda = lambda;

  const double s = requirement_scale;
  Matrix tracking_req(2, 5);
  tracking_req << 7 * s, 4 * s, 3 * s, 1 * s, 10 * s,
      10.5 * s, 2.1 * s, 6.3 * s, 0, 10.5 * s;

  TaskDefinition track1;
  track1.name = "track_target_1";
  track1.kind = TaskKind::target_tracking;
  track1.target = fixed_target(-5.0, 4.0);
  track1.tracking_distance_sq = 4.0;
  track1.spacing = 1.2;
  track1.requirements = tracking_req;
  track1.priority = 100.0;
  track1.transition_cost = 65.0;

  TaskDefinition track2 = track1;
  track2.name = "track_target_2";
  track2.target = touring_target(Vec2(5.0, 4.0), 1.0, 10.0, 26.0, 60.0);
  track2.transition_cost = 18.0;

  TaskDefinition monitor;
  monitor.name = "monitor";
  monitor.kind = TaskKind::coverage;
  monitor.domain.lo = Vec2(-10.0, -10.0);
  monitor.domain.hi = Vec2(10.0, 10.0);
  monitor.domain.center = Vec2(0.0, 0.0);
  monitor.domain.sigma = 2.5;
  monitor.requirements = Matrix(1, 5);
  monitor.requirements << 20 * s, 4 * s, 12 * s, 0, 15 * s;
  monitor.priority = 10.0;
  monitor.transition_cost = 45.0;

  cfg.tasks = {track1, track2, monitor};

  // Ice sheet around the target-2 work area; only ground robots slip.
  DisturbanceSpec ice;
  ice.kind = DisturbanceKind::friction_zone;
  ice.magnitude = 1.0;
  ice.region = Region{Vec2(2.0, 1.0), Vec2(8.0, 7.0)};
  ice.t_start = 9.0;
  ice.t_end = 20.0;
  for (int g = 0; g < n_ground; ++g) ice.robot_ids.push_back(n_aerial + g);

  DisturbanceSpec fog;
  fog.kind = DisturbanceKind::sensing_fog;
  fog.magnitude = 0.8;
  fog.t_start = 26.0;
  fog.t_end = 28.0;
  fog.task_id = 1;

  cfg.disturbances = {ice, fog};

  std::vector<Vec2> positions;
  for (int a = 0; a < n_aerial; ++a) {
    positions.emplace_back(-8.0 + 16.0 * a / std::max(1, n_aerial - 1), -8.0);
  }
  for (int g = 0; g < n_ground; ++g) {
    positions.emplace_back(-4.0 + 8.0 * g / std::max(1, n_ground - 1), -6.5);
  }
  cfg.positions = std::move(positions);

  cfg.dt = 0.05;
  cfg.duration = 60.0;
  cfg.chi = 0.33;
  cfg.dv_thresh = 0.9;
  cfg.margin_weight = 1.0;
  cfg.delta_max = 1000.0;
  cfg.gain = 0.3;
  cfg.speed_limit = 2.0;
  cfg.coverage_grid = 48;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> builtin_scenario_names() {
  return {
      {"example1",
       "leader-follower pair, head wind on the follower; discrepancy demo"},
      {"example2",
       "same pair with the capability lens; degradation converges toward "
       "[0.15, 0, 0.3]"},
      {"coverage_tracking",
       "desk-scale coverage and target tracking (8 aerial + 4 ground), "
       "friction and fog faults"},
      {"coverage_tracking_large",
       "32 aerial + 8 ground coverage and target tracking for randomized "
       "trials"},
  };
}

ScenarioConfig builtin_scenario(const std::string& name) {
  if (name == "example1") return leader_follower_scenario("example1", 8.0);
  if (name == "example2") return leader_follower_scenario("example2", 10.0);
  if (name == "coverage_tracking") {
    return coverage_tracking_scenario(8, 4, 1.0, "coverage_tracking");
  }
  if (name == "coverage_tracking_large") {
    ScenarioConfig cfg =
        coverage_tracking_scenario(32, 8, 2.0, "coverage_tracking_large");
    // Larger coverage demand, a full ground reserve, and touring targets on
    // both tracking tasks for trial randomization.
    cfg.tasks[2].requirements << 60, 12, 36, 0, 45;
    IntVector lambda(2);
    lambda << 32, 8;
    cfg.lambda = lambda;
    cfg.tasks[0].target = touring_target(Vec2(-5.0, 4.0), 1.0, 8.0, 30.0, 55.0);
    cfg.tasks[1].target = touring_target(Vec2(5.0, 4.0), 1.0, 8.0, 26.0, 55.0);
    cfg.duration = 55.0;
    cfg.positions.reset();
    cfg.spawn = Region{Vec2(-9.0, -9.0), Vec2(9.0, -5.5)};
    return cfg;
  }
  throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

AllocationProblem scaled_benchmark_problem(int n_robots, Rng& rng) {
  if (n_robots < 1) {
    throw std::invalid_argument("benchmark team needs at least one robot");
  }
  int n_aerial = std::max(1, static_cast<int>(std::lround(0.8 * n_robots)));
  if (n_aerial >= n_robots) n_aerial = n_robots == 1 ? 1 : n_robots - 1;
  int n_ground = n_robots - n_aerial;

  AllocationProblem p;
  p.capabilities.Q = Matrix(2, 5);
  p.capabilities.Q << 5, 1, 3, 0, 5, 2, 3, 0, 1, 8;
  p.capabilities.capability_names = {"perception", "resolution", "airspeed",
                                     "groundspeed", "comm_rate"};
  p.capabilities.species_names = {"aerial", "ground"};
  std::vector<int> ids;
  for (int i = 0; i < n_aerial; ++i) ids.push_back(0);
  for (int i = 0; i < n_ground; ++i) ids.push_back(1);
  p.mapping = SpeciesMapping::from_species_ids(ids, 2);

  double tracking_scale = std::max(1.0, std::floor(n_robots / 12.0));
  double coverage_scale = std::max(1.0, std::floor(n_robots / 10.0));
  Matrix tracking(2, 5);
  tracking << 7, 4, 3, 1, 10, 10.5, 2.1, 6.3, 0, 10.5;
  tracking *= tracking_scale;
  Matrix coverage(1, 5);
  coverage << 20, 4, 12, 0, 15;
  coverage *= coverage_scale;
  p.requirements = {tracking, tracking, coverage};

  p.degradation = Matrix::Zero(3, 5);
  for (int u = 0; u < 5; ++u) {
    // Mild degradation concentrated on the second tracking task, as after a
    // localized fault.
    if (rng.uniform() < 0.6) p.degradation(1, u) = rng.uniform(0.0, 0.35);
  }
  p.task_priorities = Vector(3);
  p.task_priorities << 100, 100, 10;
  p.deploy_costs = Vector::Constant(2, 0.1);
  p.transition_costs = Vector(3);
  p.transition_costs << 65, 18, 45;

  p.previous_allocation = IntMatrix::Zero(3, n_robots);
  int k1 = static_cast<int>(tracking_scale);
  int k3 = 4 * static_cast<int>(coverage_scale);
  int a = 0, g = n_aerial;
  for (int m = 0; m < 2; ++m) {
    for (int j = 0; j < k1 && a < n_aerial; ++j) p.previous_allocation(m, a++) = 1;
    for (int j = 0; j < k1 && g < n_robots; ++j) p.previous_allocation(m, g++) = 1;
  }
  for (int j = 0; j < k3 && a < n_aerial; ++j) p.previous_allocation(2, a++) = 1;

  p.discrepancies = Vector::Zero(n_robots);
  for (int i = 0; i < n_robots; ++i) {
    p.discrepancies(i) = rng.uniform() < 0.05 ? rng.uniform(0.91, 1.0)
                                              : rng.uniform(0.0, 0.2);
  }
  p.dv_thresh = 0.9;
  p.margin_weight = 1.0;
  p.delta_max = 1000.0;
  return p;
}

}  // namespace rta
