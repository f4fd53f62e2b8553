#pragma once

#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rta/linalg.hpp"

namespace rta {

enum class TaskKind { goal_tracking, follower, target_tracking, coverage };

std::string to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(const std::string& s);

/// Piecewise-linear waypoint schedule. Between waypoints the point moves at
/// the segment slope; before the first and after the last it holds position.
/// The slope is the commanded velocity known to the one-step predictor.
struct Trajectory {
  struct Waypoint {
    double t;
    Vec2 pos;
  };
  std::vector<Waypoint> waypoints;

  Vec2 position(double t) const;
  Vec2 velocity(double t) const;
  static Trajectory fixed(const Vec2& p);
};

/// Rectangular coverage domain with an importance density. sigma > 0 selects
/// a Gaussian centered at `center`; sigma == 0 means uniform density.
struct CoverageDomain {
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};
  Vec2 center{0.0, 0.0};
  double sigma = 0.0;
  int grid = 48;
};

struct TaskDefinition {
  std::string name;
  TaskKind kind = TaskKind::goal_tracking;

  Trajectory goal;                 // goal_tracking and follower leader
  double follow_distance = 1.0;    // follower
  Trajectory target;               // target_tracking
  double tracking_distance_sq = 1.0;  // desired squared distance to target
  double spacing = 0.5;            // minimum inter-robot distance constant
  CoverageDomain domain;           // coverage

  Matrix requirements;       // K_m x U alternative capability configurations
  double priority = 1.0;     // relaxation weight w_J
  double transition_cost = 0.0;  // diagonal entry of T
};

struct RobotState {
  Vec2 x{0.0, 0.0};
  Vec2 home{0.0, 0.0};
  int species = 0;
  double e = 0.0;  // scalar sensing-degradation state, >= 0
  int task = -1;   // -1 == idle
};

enum class DisturbanceKind { control_multiplier, friction_zone, sensing_fog };

struct Region {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};
  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
           p.y() <= hi.y();
  }
};

/// One environmental disturbance. `magnitude` is the control multiplier w in
/// [0,1] for motion disturbances, or the growth rate of e (1/s) for fog.
/// Scope filters compose: a robot is affected only if it matches the id list
/// (empty = all), is inside the region (if any), and is allocated to the
/// given task (task_id < 0 = any).
struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::control_multiplier;
  double magnitude = 0.0;
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();
  double ramp = 0.0;  // seconds to reach full magnitude, linear

  std::vector<int> robot_ids;
  std::optional<Region> region;
  int task_id = -1;

  bool active(double t) const { return t >= t_start && t < t_end; }
  bool applies_to(int robot_id, const RobotState& state) const;
  double strength(double t) const;  // magnitude scaled by the ramp
};

/// Per-tick evaluation context: task membership and frozen coverage targets.
struct TaskContext {
  double time = 0.0;
  std::vector<int> members;  // sorted robot ids allocated to the task
  std::unordered_map<int, Vec2> coverage_targets;
};

/// Value and analytic gradients of one robot-wise task-value term. Neighbor
/// entries cover every robot state the term depends on besides x_i; the
/// reference gradient covers the moving goal or target.
struct ValueGradient {
  double value = 0.0;
  Vec2 d_self{0.0, 0.0};
  std::vector<std::pair<int, Vec2>> d_neighbors;
  Vec2 d_reference{0.0, 0.0};
  Vec2 reference_velocity{0.0, 0.0};
};

ValueGradient evaluate_task_term(const TaskDefinition& task, int robot_id,
                                 const std::vector<RobotState>& robots,
                                 const TaskContext& ctx);

double robot_task_value(const TaskDefinition& task, int robot_id,
                        const std::vector<RobotState>& robots,
                        const TaskContext& ctx);

/// u_i = -k * dV/dx_i.
Vec2 gradient_controller(const TaskDefinition& task, int robot_id,
                         const std::vector<RobotState>& robots,
                         const TaskContext& ctx, double gain);

/// Explicit Euler step of x' = u under the active disturbances. Motion
/// disturbances multiply the commanded velocity by prod(1 - w); fog raises e
/// and leaves x alone.
RobotState step_dynamics(const RobotState& state, int robot_id, const Vec2& u,
                         const std::vector<DisturbanceSpec>& disturbances,
                         double t, double dt);

/// One-step prediction of the robot-wise task value under commanded
/// (disturbance-free) velocities of the robot, its neighbors, and the
/// reference trajectory.
double predicted_task_value(
    const TaskDefinition& task, int robot_id,
    const std::vector<RobotState>& robots, const TaskContext& ctx,
    const std::unordered_map<int, Vec2>& commanded_velocities, double dt);

/// Fractional one-step performance discrepancy, clamped to [0,1].
/// Degenerate denominator (no progress expected) yields 0.
double task_discrepancy(double v_prev, double v_meas, double v_pred);

/// First-order low-pass of the discrepancy stream, clamped to [0,1].
double smooth_discrepancy(double smoothed_prev, double dv, double dt);

/// Density-weighted Voronoi centroids for the robots of a coverage task,
/// computed by grid quadrature over the domain. Returns one target per
/// member, in member order. A robot whose cell carries no mass keeps its
/// position as the target.
std::vector<Vec2> coverage_targets(const std::vector<Vec2>& positions,
                                   const CoverageDomain& domain);

}  // namespace rta
