#include "rta/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rta {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::goal_tracking:
      return "goal_tracking";
    case TaskKind::follower:
      return "follower";
    case TaskKind::target_tracking:
      return "target_tracking";
    case TaskKind::coverage:
      return "coverage";
  }
  return "unknown";
}

std::optional<TaskKind> task_kind_from_string(const std::string& s) {
  if (s == "goal_tracking") return TaskKind::goal_tracking;
  if (s == "follower") return TaskKind::follower;
  if (s == "target_tracking") return TaskKind::target_tracking;
  if (s == "coverage") return TaskKind::coverage;
  return std::nullopt;
}

Vec2 Trajectory::position(double t) const {
  if (waypoints.empty()) return Vec2::Zero();
  if (t <= waypoints.front().t) return waypoints.front().pos;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    if (t <= waypoints[k].t) {
      const auto& a = waypoints[k - 1];
      const auto& b = waypoints[k];
      double span = b.t - a.t;
      if (span <= 0.0) return b.pos;
      double alpha = (t - a.t) / span;
      return a.pos + alpha * (b.pos - a.pos);
    }
  }
  return waypoints.back().pos;
}

Vec2 Trajectory::velocity(double t) const {
  if (waypoints.size() < 2) return Vec2::Zero();
  if (t < waypoints.front().t || t >= waypoints.back().t) return Vec2::Zero();
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    if (t < waypoints[k].t) {
      const auto& a = waypoints[k - 1];
      const auto& b = waypoints[k];
      double span = b.t - a.t;
      if (span <= 0.0) return Vec2::Zero();
      return (b.pos - a.pos) / span;
    }
  }
  return Vec2::Zero();
}

Trajectory Trajectory::fixed(const Vec2& p) {
  Trajectory tr;
  tr.waypoints.push_back({0.0, p});
  return tr;
}

bool DisturbanceSpec::applies_to(int robot_id, const RobotState& state) const {
  if (!robot_ids.empty() &&
      std::find(robot_ids.begin(), robot_ids.end(), robot_id) ==
          robot_ids.end()) {
    return false;
  }
  if (region && !region->contains(state.x)) return false;
  if (task_id >= 0 && state.task != task_id) return false;
  return true;
}

double DisturbanceSpec::strength(double t) const {
  if (!active(t)) return 0.0;
  if (ramp <= 0.0) return magnitude;
  return magnitude * std::min(1.0, (t - t_start) / ramp);
}

namespace {

// Leader of a follower task: lowest allocated robot id.
int leader_of(const TaskContext& ctx) {
  return ctx.members.empty() ? -1 : ctx.members.front();
}

ValueGradient goal_term(const Vec2& x, const Trajectory& goal, double t) {
  ValueGradient g;
  Vec2 r = x - goal.position(t);
  g.value = 0.5 * r.squaredNorm();
  g.d_self = r;
  g.d_reference = -r;
  g.reference_velocity = goal.velocity(t);
  return g;
}

}  // namespace

ValueGradient evaluate_task_term(const TaskDefinition& task, int robot_id,
                                 const std::vector<RobotState>& robots,
                                 const TaskContext& ctx) {
  const RobotState& self = robots.at(robot_id);
  switch (task.kind) {
    case TaskKind::goal_tracking:
      return goal_term(self.x, task.goal, ctx.time);

    case TaskKind::follower: {
      int leader = leader_of(ctx);
      if (robot_id == leader) return goal_term(self.x, task.goal, ctx.time);
      if (leader < 0) {
        throw std::invalid_argument("follower task has no leader");
      }
      ValueGradient g;
      Vec2 r = self.x - robots.at(leader).x;
      double n = r.norm();
      double gap = n - task.follow_distance;
      g.value = 0.5 * gap * gap;
      if (n > 1e-12) {
        g.d_self = gap * r / n;
        g.d_neighbors.emplace_back(leader, -gap * r / n);
      }
      return g;
    }

    case TaskKind::target_tracking: {
      ValueGradient g;
      Vec2 r = self.x - task.target.position(ctx.time);
      double rho = r.squaredNorm();
      double dist_gap = rho - task.tracking_distance_sq;
      g.value = 0.5 * (dist_gap * dist_gap + self.e * rho);
      g.d_self = 2.0 * dist_gap * r + self.e * r;
      g.d_reference = -g.d_self;
      g.reference_velocity = task.target.velocity(ctx.time);

      // Inter-robot spacing term; dropped for a singleton task where the
      // empty sum would contribute a constant 1/d0^4 with zero gradient.
      if (ctx.members.size() >= 2) {
        double inv_d0_sq = 1.0 / (task.spacing * task.spacing);
        double s = -inv_d0_sq;
        for (int j : ctx.members) {
          if (j == robot_id) continue;
          double dist_sq =
              std::max((self.x - robots.at(j).x).squaredNorm(), 1e-12);
          s += 1.0 / dist_sq;
        }
        g.value += 0.5 * s * s;
        for (int j : ctx.members) {
          if (j == robot_id) continue;
          Vec2 diff = self.x - robots.at(j).x;
          double dist_sq = std::max(diff.squaredNorm(), 1e-12);
          Vec2 dsdxi = -2.0 * diff / (dist_sq * dist_sq);
          g.d_self += s * dsdxi;
          g.d_neighbors.emplace_back(j, -s * dsdxi);
        }
      }
      return g;
    }

    case TaskKind::coverage: {
      ValueGradient g;
      auto it = ctx.coverage_targets.find(robot_id);
      Vec2 c = it != ctx.coverage_targets.end() ? it->second : self.x;
      Vec2 r = self.x - c;
      g.value = 0.5 * r.squaredNorm();
      g.d_self = r;
      return g;
    }
  }
  throw std::logic_error("unhandled task kind");
}

double robot_task_value(const TaskDefinition& task, int robot_id,
                        const std::vector<RobotState>& robots,
                        const TaskContext& ctx) {
  return evaluate_task_term(task, robot_id, robots, ctx).value;
}

Vec2 gradient_controller(const TaskDefinition& task, int robot_id,
                         const std::vector<RobotState>& robots,
                         const TaskContext& ctx, double gain) {
  return -gain * evaluate_task_term(task, robot_id, robots, ctx).d_self;
}

RobotState step_dynamics(const RobotState& state, int robot_id, const Vec2& u,
                         const std::vector<DisturbanceSpec>& disturbances,
                         double t, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_dynamics: dt must be > 0");
  RobotState next = state;
  double factor = 1.0;
  for (const auto& d : disturbances) {
    if (!d.active(t) || !d.applies_to(robot_id, state)) continue;
    switch (d.kind) {
      case DisturbanceKind::control_multiplier:
      case DisturbanceKind::friction_zone:
        factor *= 1.0 - std::clamp(d.strength(t), 0.0, 1.0);
        break;
      case DisturbanceKind::sensing_fog:
        next.e += dt * d.strength(t);
        break;
    }
  }
  next.x = state.x + dt * factor * u;
  return next;
}

double predicted_task_value(
    const TaskDefinition& task, int robot_id,
    const std::vector<RobotState>& robots, const TaskContext& ctx,
    const std::unordered_map<int, Vec2>& commanded_velocities, double dt) {
  ValueGradient g = evaluate_task_term(task, robot_id, robots, ctx);
  auto velocity_of = [&](int id) -> Vec2 {
    auto it = commanded_velocities.find(id);
    return it != commanded_velocities.end() ? it->second : Vec2::Zero();
  };
  double v_dot = g.d_self.dot(velocity_of(robot_id));
  for (const auto& [id, grad] : g.d_neighbors) {
    v_dot += grad.dot(velocity_of(id));
  }
  v_dot += g.d_reference.dot(g.reference_velocity);
  return g.value + dt * v_dot;
}

double task_discrepancy(double v_prev, double v_meas, double v_pred) {
  double denom = v_pred - v_prev;
  if (std::abs(denom) < 1e-9) return 0.0;
  double dv = 1.0 - (v_meas - v_prev) / denom;
  return std::clamp(dv, 0.0, 1.0);
}

double smooth_discrepancy(double smoothed_prev, double dv, double dt) {
  return std::clamp(smoothed_prev + dt * (dv - smoothed_prev), 0.0, 1.0);
}

std::vector<Vec2> coverage_targets(const std::vector<Vec2>& positions,
                                   const CoverageDomain& domain) {
  std::vector<Vec2> targets(positions.size());
  if (positions.empty()) return targets;

  const int n = domain.grid;
  const double dx = (domain.hi.x() - domain.lo.x()) / n;
  const double dy = (domain.hi.y() - domain.lo.y()) / n;
  std::vector<double> mass(positions.size(), 0.0);
  std::vector<Vec2> moment(positions.size(), Vec2::Zero());

  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      Vec2 q(domain.lo.x() + (ix + 0.5) * dx, domain.lo.y() + (iy + 0.5) * dy);
      double w = 1.0;
      if (domain.sigma > 0.0) {
        double r_sq = (q - domain.center).squaredNorm();
        w = std::exp(-r_sq / (2.0 * domain.sigma * domain.sigma));
      }
      std::size_t owner = 0;
      double best = (q - positions[0]).squaredNorm();
      for (std::size_t i = 1; i < positions.size(); ++i) {
        double d = (q - positions[i]).squaredNorm();
        if (d < best) {
          best = d;
          owner = i;
        }
      }
      mass[owner] += w;
      moment[owner] += w * q;
    }
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    targets[i] = mass[i] > 1e-12 ? Vec2(moment[i] / mass[i]) : positions[i];
  }
  return targets;
}

}  // namespace rta
