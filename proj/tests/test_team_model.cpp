#include <vector>

#include "doctest.h"
#include "rta/rng.hpp"
#include "rta/team_model.hpp"

using namespace rta;

namespace {

// Two-species team from the leader-follower example: perception, ground
// mobility, aerial mobility.
CapabilityMatrix example2_capabilities() {
  CapabilityMatrix q;
  q.Q = Matrix(2, 3);
  q.Q << 10, 2, 0, 10, 0, 5;
  q.capability_names = {"perception", "ground_mobility", "aerial_mobility"};
  q.species_names = {"ground", "aerial"};
  return q;
}

}  // namespace

TEST_CASE("binary shadow marks exactly the positive entries") {
  auto q = example2_capabilities();
  IntMatrix shadow = binary_shadow(q.Q);
  IntMatrix expected(2, 3);
  expected << 1, 1, 0, 1, 0, 1;
  CHECK(shadow == expected);

  CHECK(binary_shadow(Matrix::Zero(2, 3)) == IntMatrix::Zero(2, 3));

  Matrix eye(2, 2);
  eye << 1, 0, 0, 1;
  IntMatrix eye_shadow = binary_shadow(eye);
  CHECK(eye_shadow(0, 0) == 1);
  CHECK(eye_shadow(0, 1) == 0);
  // Idempotence on binary inputs.
  CHECK(binary_shadow(eye_shadow.cast<double>()) == eye_shadow);
}

TEST_CASE("aggregate capabilities sums assigned robots") {
  auto q = example2_capabilities();
  auto mapping = SpeciesMapping::from_species_ids({0, 1}, 2);

  IntVector both(2);
  both << 1, 1;
  Vector c = aggregate_capabilities(both, mapping, q);
  CHECK(c(0) == doctest::Approx(20));
  CHECK(c(1) == doctest::Approx(2));
  CHECK(c(2) == doctest::Approx(5));

  IntVector none = IntVector::Zero(2);
  CHECK(aggregate_capabilities(none, mapping, q).isZero());

  IntVector first(2);
  first << 1, 0;
  Vector c1 = aggregate_capabilities(first, mapping, q);
  CHECK(c1(0) == doctest::Approx(10));
  CHECK(c1(1) == doctest::Approx(2));
  CHECK(c1(2) == doctest::Approx(0));

  IntVector wrong_size(3);
  wrong_size << 1, 0, 0;
  CHECK_THROWS_AS(aggregate_capabilities(wrong_size, mapping, q),
                  std::invalid_argument);
}

TEST_CASE("capability conservation under any partition") {
  auto q = example2_capabilities();
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(6));
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = static_cast<int>(rng.uniform_int(2));
    auto mapping = SpeciesMapping::from_species_ids(ids, 2);

    int tasks = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<IntVector> rows(tasks, IntVector::Zero(n));
    for (int i = 0; i < n; ++i) {
      rows[rng.uniform_int(tasks)](i) = 1;
    }
    Vector total = Vector::Zero(3);
    for (const auto& row : rows) {
      total += aggregate_capabilities(row, mapping, q);
    }
    Vector all = aggregate_capabilities(IntVector::Ones(n), mapping, q);
    CHECK((total - all).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("effective capabilities discount elementwise") {
  Vector c(3);
  c << 20, 2, 5;
  CHECK((effective_capabilities(c, Vector::Zero(3)) - c).isZero());
  CHECK(effective_capabilities(c, Vector::Ones(3)).isZero());

  Vector d(3);
  d << 0.15, 0, 0.3;
  Vector eff = effective_capabilities(c, d);
  CHECK(eff(0) == doctest::Approx(17.0));
  CHECK(eff(1) == doctest::Approx(2.0));
  CHECK(eff(2) == doctest::Approx(3.5));

  Vector bad(3);
  bad << 0.5, 1.2, 0;
  CHECK_THROWS_AS(effective_capabilities(c, bad), std::invalid_argument);
}

TEST_CASE("effective capabilities are monotone in each degradation entry") {
  Rng rng(7);
  Vector c(4);
  c << 3, 7, 0.5, 11;
  for (int trial = 0; trial < 50; ++trial) {
    Vector d(4), d_hi(4);
    for (int u = 0; u < 4; ++u) {
      d(u) = rng.uniform();
      d_hi(u) = d(u) + (1.0 - d(u)) * rng.uniform();
    }
    Vector lo = effective_capabilities(c, d_hi);
    Vector hi = effective_capabilities(c, d);
    CHECK((hi - lo).minCoeff() >= -1e-12);
  }
}

TEST_CASE("validate_team reports every violation") {
  auto q = example2_capabilities();
  auto mapping = SpeciesMapping::from_species_ids({0, 1}, 2);
  CHECK(validate_team(q, mapping).empty());

  SpeciesMapping doubled = mapping;
  doubled.P(0, 1) = 1;  // robot 1 in two species
  auto violations = validate_team(q, doubled);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("two species") != std::string::npos);

  CapabilityMatrix negative = q;
  negative.Q(0, 1) = -2.0;
  violations = validate_team(negative, mapping);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("negative capability") != std::string::npos);
}
