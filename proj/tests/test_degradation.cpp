#include <cmath>

#include "doctest.h"
#include "rta/degradation.hpp"
#include "rta/rng.hpp"

using namespace rta;

namespace {

IntMatrix example2_shadow() {
  IntMatrix q(2, 3);
  q << 1, 1, 0, 1, 0, 1;
  return q;
}

}  // namespace

TEST_CASE("instantaneous degradation averages per species and capability") {
  // Leader-follower team, wind on the aerial robot only: perception is the
  // mean over both species, ground mobility untouched, aerial mobility takes
  // the full discrepancy.
  IntMatrix p_sub = IntMatrix::Identity(2, 2);
  Vector dv(2);
  dv << 0.0, 0.3;
  Vector d_star = instantaneous_degradation(dv, p_sub, example2_shadow());
  CHECK(d_star(0) == doctest::Approx(0.15));
  CHECK(d_star(1) == doctest::Approx(0.0));
  CHECK(d_star(2) == doctest::Approx(0.3));

  CHECK(instantaneous_degradation(Vector::Zero(2), p_sub, example2_shadow())
            .isZero());

  // Single species holding every capability: per-species average.
  IntMatrix p_one(1, 2);
  p_one << 1, 1;
  IntMatrix q_one(1, 3);
  q_one << 1, 1, 1;
  Vector dv2(2);
  dv2 << 0.4, 0.6;
  Vector avg = instantaneous_degradation(dv2, p_one, q_one);
  for (int u = 0; u < 3; ++u) CHECK(avg(u) == doctest::Approx(0.5));

  // Empty task.
  CHECK(instantaneous_degradation(Vector(), IntMatrix(2, 0),
                                  example2_shadow())
            .isZero());
}

TEST_CASE("instantaneous degradation is a convex combination of inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    int species = 1 + static_cast<int>(rng.uniform_int(3));
    int robots = 1 + static_cast<int>(rng.uniform_int(5));
    int caps = 1 + static_cast<int>(rng.uniform_int(4));
    IntMatrix p = IntMatrix::Zero(species, robots);
    for (int i = 0; i < robots; ++i) p(rng.uniform_int(species), i) = 1;
    IntMatrix q(species, caps);
    for (int s = 0; s < species; ++s) {
      for (int u = 0; u < caps; ++u) q(s, u) = rng.uniform() < 0.6 ? 1 : 0;
    }
    Vector dv(robots);
    for (int i = 0; i < robots; ++i) dv(i) = rng.uniform();
    Vector d_star = instantaneous_degradation(dv, p, q);
    CHECK(d_star.minCoeff() >= 0.0);
    CHECK(d_star.maxCoeff() <= dv.maxCoeff() + 1e-12);
  }
}

TEST_CASE("capability indicator marks available capabilities") {
  CHECK(capability_indicator(example2_shadow()) == IntVector::Ones(3));

  IntMatrix ground_only(1, 3);
  ground_only << 1, 1, 0;
  IntVector theta = capability_indicator(ground_only);
  CHECK(theta(0) == 1);
  CHECK(theta(1) == 1);
  CHECK(theta(2) == 0);

  CHECK(capability_indicator(IntMatrix::Zero(0, 3)) == IntVector::Zero(3));
}

TEST_CASE("degradation update follows the gated first-order law") {
  Vector d = Vector::Zero(3);
  Vector d_star(3);
  d_star << 0.15, 0, 0.3;
  Vector next = update_degradation(d, d_star, IntVector::Ones(3), 0.1);
  CHECK(next(0) == doctest::Approx(0.015));
  CHECK(next(1) == doctest::Approx(0.0));
  CHECK(next(2) == doctest::Approx(0.03));

  IntVector gate(3);
  gate << 1, 1, 0;
  Vector d2 = Vector::Constant(3, 0.2);
  Vector target = Vector::Ones(3);
  Vector gated = update_degradation(d2, target, gate, 0.5);
  CHECK(gated(0) == doctest::Approx(0.6));
  CHECK(gated(1) == doctest::Approx(0.6));
  CHECK(gated(2) == doctest::Approx(0.2));
}

TEST_CASE("degradation update closed form convergence") {
  // Constant target: d[t] = d* + (1-dt)^t (d[0] - d*).
  double dt = 0.1;
  Vector d0(2);
  d0 << 0.8, 0.1;
  Vector d_star(2);
  d_star << 0.25, 0.6;
  Vector d = d0;
  for (int t = 1; t <= 300; ++t) {
    d = update_degradation(d, d_star, IntVector::Ones(2), dt);
    Vector expected = d_star + std::pow(1.0 - dt, t) * (d0 - d_star);
    CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((d - d_star).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("degradation update preserves the unit box") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int caps = 1 + static_cast<int>(rng.uniform_int(4));
    Vector d(caps), d_star(caps);
    IntVector gate(caps);
    for (int u = 0; u < caps; ++u) {
      d(u) = rng.uniform();
      d_star(u) = rng.uniform();
      gate(u) = rng.uniform() < 0.5 ? 1 : 0;
    }
    double dt = rng.uniform(1e-3, 1.0);
    Vector next = update_degradation(d, d_star, gate, dt);
    CHECK(next.minCoeff() >= 0.0);
    CHECK(next.maxCoeff() <= 1.0);
    for (int u = 0; u < caps; ++u) {
      if (!gate(u)) CHECK(next(u) == d(u));
    }
  }
}

TEST_CASE("reallocation trigger is one-sided") {
  Matrix snapshot = Matrix::Zero(2, 3);
  Matrix d = Matrix::Zero(2, 3);
  d(1, 2) = 0.4;
  CHECK(reallocation_trigger(d, snapshot, 0.33));

  CHECK_FALSE(reallocation_trigger(snapshot, snapshot, 0.33));

  Matrix recovered = Matrix::Zero(2, 3);
  Matrix high = Matrix::Zero(2, 3);
  high(0, 0) = 0.5;  // entry decreased by 0.5 since the snapshot
  CHECK_FALSE(reallocation_trigger(recovered, high, 0.33));
}

TEST_CASE("lowering the trigger threshold never untriggers") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix d(2, 3), snap(2, 3);
    for (int m = 0; m < 2; ++m) {
      for (int u = 0; u < 3; ++u) {
        d(m, u) = rng.uniform();
        snap(m, u) = rng.uniform();
      }
    }
    double chi_hi = rng.uniform(0.05, 1.0);
    double chi_lo = chi_hi * rng.uniform();
    if (reallocation_trigger(d, snap, chi_hi)) {
      CHECK(reallocation_trigger(d, snap, chi_lo));
    }
  }
}

TEST_CASE("degradation state snapshot semantics") {
  DegradationState state(2, 3);
  Vector d_star(3);
  d_star << 1, 1, 1;
  for (int t = 0; t < 5; ++t) {
    state.update_task(0, d_star, IntVector::Ones(3), 0.1);
  }
  CHECK(state.should_trigger(0.33));
  CHECK_FALSE(state.should_trigger(0.5));
  state.on_solved(5);
  CHECK_FALSE(state.should_trigger(0.33));
  CHECK(state.snapshot()(0, 0) == doctest::Approx(state.d()(0, 0)));
}
