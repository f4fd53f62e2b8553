#include <cmath>
#include <unordered_map>

#include "doctest.h"
#include "rta/rng.hpp"
#include "rta/tasks.hpp"

using namespace rta;

namespace {

TaskDefinition goal_task(const Vec2& g) {
  TaskDefinition t;
  t.kind = TaskKind::goal_tracking;
  t.goal = Trajectory::fixed(g);
  return t;
}

TaskDefinition follower_task(const Vec2& g, double d) {
  TaskDefinition t;
  t.kind = TaskKind::follower;
  t.goal = Trajectory::fixed(g);
  t.follow_distance = d;
  return t;
}

TaskDefinition tracking_task(const Vec2& target, double d_k_sq, double d0) {
  TaskDefinition t;
  t.kind = TaskKind::target_tracking;
  t.target = Trajectory::fixed(target);
  t.tracking_distance_sq = d_k_sq;
  t.spacing = d0;
  return t;
}

TaskContext members_ctx(std::vector<int> ids, double time = 0.0) {
  TaskContext ctx;
  ctx.time = time;
  ctx.members = std::move(ids);
  return ctx;
}

}  // namespace

TEST_CASE("robot task values match the closed forms") {
  std::vector<RobotState> robots(2);

  robots[0].x = Vec2(1, 0);
  auto goal = goal_task(Vec2(0, 0));
  CHECK(robot_task_value(goal, 0, robots, members_ctx({0})) ==
        doctest::Approx(0.5));

  robots[0].x = Vec2(0, 0);
  robots[1].x = Vec2(0, 3);
  auto follow = follower_task(Vec2(0, 0), 3.0);
  CHECK(robot_task_value(follow, 1, robots, members_ctx({0, 1})) ==
        doctest::Approx(0.0));

  // Two robots at the desired squared distance from the target, separated by
  // exactly d0, no sensing degradation: every term vanishes.
  double d0 = 2.0;
  auto track = tracking_task(Vec2(0, 0), 1.0, d0);
  robots[0].x = Vec2(1, 0);
  robots[1].x = Vec2(-1, 0);
  robots[0].e = robots[1].e = 0.0;
  // Inter-robot distance is 2 = d0, so 1/dist^2 - 1/d0^2 = 0... with a
  // single neighbor the spacing sum has one term.
  CHECK(robot_task_value(track, 0, robots, members_ctx({0, 1})) ==
        doctest::Approx(0.0));
  CHECK(robot_task_value(track, 1, robots, members_ctx({0, 1})) ==
        doctest::Approx(0.0));
}

TEST_CASE("single-robot tracking drops the spacing term") {
  auto track = tracking_task(Vec2(0, 0), 4.0, 0.5);
  std::vector<RobotState> robots(1);
  robots[0].x = Vec2(2, 0);
  CHECK(robot_task_value(track, 0, robots, members_ctx({0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("gradient controller closed forms") {
  std::vector<RobotState> robots(2);
  robots[0].x = Vec2(1, 0);
  auto goal = goal_task(Vec2(0, 0));
  Vec2 u = gradient_controller(goal, 0, robots, members_ctx({0}), 1.0);
  CHECK(u.x() == doctest::Approx(-1.0));
  CHECK(u.y() == doctest::Approx(0.0));

  robots[0].x = Vec2(0, 0);
  robots[1].x = Vec2(0, 3);
  auto follow = follower_task(Vec2(0, 0), 3.0);
  Vec2 u2 = gradient_controller(follow, 1, robots, members_ctx({0, 1}), 2.0);
  CHECK(u2.norm() == doctest::Approx(0.0));

  // Coverage robot parked at its assigned centroid commands nothing.
  TaskDefinition cov;
  cov.kind = TaskKind::coverage;
  auto ctx = members_ctx({0});
  ctx.coverage_targets[0] = Vec2(0, 0);
  robots[0].x = Vec2(0, 0);
  Vec2 u3 = gradient_controller(cov, 0, robots, ctx, 1.0);
  CHECK(u3.norm() == doctest::Approx(0.0));
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(99);
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RobotState> robots(3);
    for (auto& r : robots) {
      r.x = Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
      r.e = rng.uniform(0, 0.5);
    }
    TaskDefinition task;
    TaskContext ctx = members_ctx({0, 1, 2});
    switch (trial % 4) {
      case 0:
        task = goal_task(Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2)));
        break;
      case 1:
        task = follower_task(Vec2(0, 0), rng.uniform(0.5, 2.0));
        break;
      case 2:
        task = tracking_task(Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1)),
                             rng.uniform(0.5, 4.0), rng.uniform(0.3, 1.0));
        break;
      case 3:
        task.kind = TaskKind::coverage;
        for (int i = 0; i < 3; ++i) {
          ctx.coverage_targets[i] =
              Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
        }
        break;
    }
    for (int i = 0; i < 3; ++i) {
      ValueGradient g = evaluate_task_term(task, i, robots, ctx);
      // Self gradient plus every neighbor gradient against differences.
      auto numeric = [&](int varying, int axis) {
        auto perturbed = robots;
        perturbed[varying].x(axis) += h;
        double up = robot_task_value(task, i, perturbed, ctx);
        perturbed[varying].x(axis) -= 2 * h;
        double down = robot_task_value(task, i, perturbed, ctx);
        return (up - down) / (2 * h);
      };
      for (int axis = 0; axis < 2; ++axis) {
        double fd = numeric(i, axis);
        double scale = std::max(1.0, std::abs(fd));
        CHECK(std::abs(g.d_self(axis) - fd) / scale < 1e-5);
        ++checked;
      }
      for (const auto& [j, grad] : g.d_neighbors) {
        for (int axis = 0; axis < 2; ++axis) {
          double fd = numeric(j, axis);
          double scale = std::max(1.0, std::abs(fd));
          CHECK(std::abs(grad(axis) - fd) / scale < 1e-5);
        }
      }
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("dynamics step applies multiplicative disturbances") {
  RobotState s;
  s.x = Vec2(0, 0);

  DisturbanceSpec wind;
  wind.kind = DisturbanceKind::control_multiplier;
  wind.magnitude = 0.3;
  RobotState next = step_dynamics(s, 0, Vec2(1, 0), {wind}, 0.0, 0.1);
  CHECK(next.x.x() == doctest::Approx(0.07));

  next = step_dynamics(s, 0, Vec2(1, 0), {}, 0.0, 0.1);
  CHECK(next.x.x() == doctest::Approx(0.1));

  DisturbanceSpec ice;
  ice.kind = DisturbanceKind::friction_zone;
  ice.magnitude = 1.0;
  ice.region = Region{Vec2(-1, -1), Vec2(1, 1)};
  next = step_dynamics(s, 0, Vec2(1, 0), {ice}, 0.0, 0.1);
  CHECK(next.x.norm() == doctest::Approx(0.0));  // immobilized inside

  RobotState outside;
  outside.x = Vec2(5, 5);
  next = step_dynamics(outside, 0, Vec2(1, 0), {ice}, 0.0, 0.1);
  CHECK(next.x.x() == doctest::Approx(5.1));
}

TEST_CASE("fog raises the sensing state and leaves motion alone") {
  RobotState s;
  s.x = Vec2(0, 0);
  DisturbanceSpec fog;
  fog.kind = DisturbanceKind::sensing_fog;
  fog.magnitude = 2.0;
  RobotState next = step_dynamics(s, 0, Vec2(1, 0), {fog}, 0.0, 0.1);
  CHECK(next.x.x() == doctest::Approx(0.1));
  CHECK(next.e == doctest::Approx(0.2));
}

TEST_CASE("predicted task value uses commanded velocities") {
  std::vector<RobotState> robots(1);
  robots[0].x = Vec2(1, 0);
  auto goal = goal_task(Vec2(0, 0));
  std::unordered_map<int, Vec2> u{{0, Vec2(-1, 0)}};
  CHECK(predicted_task_value(goal, 0, robots, members_ctx({0}), u, 0.1) ==
        doctest::Approx(0.4));

  std::unordered_map<int, Vec2> still{{0, Vec2(0, 0)}};
  CHECK(predicted_task_value(goal, 0, robots, members_ctx({0}), still, 0.1) ==
        doctest::Approx(0.5));
}

TEST_CASE("prediction matches finite differences of the flow") {
  // Both leader and follower commanded: the neighbor term matters.
  std::vector<RobotState> robots(2);
  robots[0].x = Vec2(0.3, -0.2);
  robots[1].x = Vec2(0.1, 2.4);
  auto follow = follower_task(Vec2(2, 1), 1.5);
  auto ctx = members_ctx({0, 1});
  std::unordered_map<int, Vec2> u{{0, Vec2(0.7, 0.4)}, {1, Vec2(-0.2, 0.9)}};

  double dt = 1e-6;
  auto moved = robots;
  moved[0].x += dt * u[0];
  moved[1].x += dt * u[1];
  double fd =
      (robot_task_value(follow, 1, moved, ctx) -
       robot_task_value(follow, 1, robots, ctx)) /
      dt;
  double predicted =
      (predicted_task_value(follow, 1, robots, ctx, u, dt) -
       robot_task_value(follow, 1, robots, ctx)) /
      dt;
  CHECK(predicted == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("task discrepancy formula and clamps") {
  CHECK(task_discrepancy(0.5, 0.43, 0.4) == doctest::Approx(0.3));
  CHECK(task_discrepancy(0.5, 0.4, 0.4) == doctest::Approx(0.0));
  CHECK(task_discrepancy(0.5, 0.6, 0.4) == doctest::Approx(1.0));
  // Degenerate denominator: no progress expected, no discrepancy charged.
  CHECK(task_discrepancy(0.5, 0.7, 0.5 + 1e-12) == doctest::Approx(0.0));
}

TEST_CASE("discrepancy is invariant to task-value rescaling") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    double v0 = rng.uniform(0.1, 2.0);
    double vm = v0 + rng.uniform(-0.5, 0.5);
    double vp = v0 + rng.uniform(-0.5, 0.5);
    double scale = rng.uniform(0.1, 40.0);
    double raw = task_discrepancy(v0, vm, vp);
    double scaled = task_discrepancy(scale * v0, scale * vm, scale * vp);
    CHECK(raw == doctest::Approx(scaled).epsilon(1e-9));
  }
}

TEST_CASE("smoothed discrepancy follows the first-order filter") {
  CHECK(smooth_discrepancy(0.0, 1.0, 0.1) == doctest::Approx(0.1));
  CHECK(smooth_discrepancy(0.5, 0.5, 0.1) == doctest::Approx(0.5));

  // Constant input from zero: closed form 0.3 (1 - (1-dt)^t).
  double dt = 0.1;
  double bar = 0.0;
  for (int t = 1; t <= 100; ++t) {
    bar = smooth_discrepancy(bar, 0.3, dt);
    double expected = 0.3 * (1.0 - std::pow(1.0 - dt, t));
    CHECK(bar == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("multiplicative disturbance identity for gradient flow") {
  // Single robot descending a goal-tracking gradient under a (1-w) control
  // multiplier shows a steady discrepancy of w.
  const double dt = 0.01;
  for (double w : {0.1, 0.2, 0.3}) {
    auto task = goal_task(Vec2(0, 0));
    std::vector<RobotState> robots(1);
    robots[0].x = Vec2(40, 0);
    DisturbanceSpec wind;
    wind.kind = DisturbanceKind::control_multiplier;
    wind.magnitude = w;
    auto ctx = members_ctx({0});

    for (int t = 0; t < 400; ++t) {
      double v_prev = robot_task_value(task, 0, robots, ctx);
      Vec2 u = gradient_controller(task, 0, robots, ctx, 1.0);
      std::unordered_map<int, Vec2> commanded{{0, u}};
      double v_pred = predicted_task_value(task, 0, robots, ctx, commanded, dt);
      robots[0] = step_dynamics(robots[0], 0, u, {wind}, t * dt, dt);
      double v_meas = robot_task_value(task, 0, robots, ctx);
      double dv = task_discrepancy(v_prev, v_meas, v_pred);
      if (t > 10) CHECK(std::abs(dv - w) < 0.02);
    }
  }
}

TEST_CASE("zero disturbance keeps the discrepancy at Euler error level") {
  const double dt = 0.01;
  // Robots near the tracking ring, separated by about the spacing constant,
  // so the gradient flow stays in the Euler-stable regime.
  auto task = tracking_task(Vec2(0, 0), 2.0, 2.6);
  std::vector<RobotState> robots(2);
  robots[0].x = Vec2(1.5, 1.2);
  robots[1].x = Vec2(-1.2, -1.4);
  auto ctx = members_ctx({0, 1});
  const double gain = 0.3;
  for (int t = 0; t < 300; ++t) {
    std::unordered_map<int, Vec2> commanded;
    for (int i = 0; i < 2; ++i) {
      commanded[i] = gradient_controller(task, i, robots, ctx, gain);
    }
    std::vector<double> v_prev(2), v_pred(2);
    for (int i = 0; i < 2; ++i) {
      v_prev[i] = robot_task_value(task, i, robots, ctx);
      v_pred[i] = predicted_task_value(task, i, robots, ctx, commanded, dt);
    }
    for (int i = 0; i < 2; ++i) {
      robots[i] = step_dynamics(robots[i], i, commanded[i], {}, t * dt, dt);
    }
    for (int i = 0; i < 2; ++i) {
      double v_meas = robot_task_value(task, i, robots, ctx);
      double dv = task_discrepancy(v_prev[i], v_meas, v_pred[i]);
      CHECK(dv < 0.05);
    }
  }
}

TEST_CASE("coverage targets by quadrature") {
  CoverageDomain uniform;
  uniform.lo = Vec2(-1, -1);
  uniform.hi = Vec2(1, 1);
  uniform.sigma = 0.0;
  uniform.grid = 64;

  auto single = coverage_targets({Vec2(0.4, -0.2)}, uniform);
  CHECK(single[0].norm() < 1e-9);  // symmetry: centroid at the origin

  // Mirror-symmetric pair about the y-axis.
  auto pair = coverage_targets({Vec2(-0.5, 0.1), Vec2(0.5, 0.1)}, uniform);
  CHECK(pair[0].x() == doctest::Approx(-pair[1].x()));
  CHECK(pair[0].y() == doctest::Approx(pair[1].y()));

  // Gaussian density: one robot anywhere gets the density mean.
  CoverageDomain gauss;
  gauss.lo = Vec2(-4, -4);
  gauss.hi = Vec2(4, 4);
  gauss.sigma = 1.0;
  gauss.grid = 96;
  auto g = coverage_targets({Vec2(2.5, -1.0)}, gauss);
  CHECK(g[0].norm() < 1e-6);
}

TEST_CASE("Lloyd iteration descends the coverage value") {
  CoverageDomain gauss;
  gauss.lo = Vec2(-3, -3);
  gauss.hi = Vec2(3, 3);
  gauss.sigma = 1.5;
  gauss.grid = 48;

  std::vector<Vec2> pos{Vec2(2.5, 2.0), Vec2(-2.0, 1.0), Vec2(0.5, -2.5)};
  auto value_at = [&](const std::vector<Vec2>& p) {
    auto c = coverage_targets(p, gauss);
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      v += 0.5 * (p[i] - c[i]).squaredNorm();
    }
    return v;
  };
  double first = value_at(pos);
  double prev = first;
  for (int it = 0; it < 15; ++it) {
    pos = coverage_targets(pos, gauss);
    double now = value_at(pos);
    // Nonincreasing up to the grid-quadrature noise floor.
    CHECK(now <= prev + 1e-4);
    prev = now;
  }
  CHECK(prev < 1e-3 * first);
}
