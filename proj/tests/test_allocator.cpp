#include <cmath>

#include "doctest.h"
#include "rta/allocator/instance_gen.hpp"
#include "rta/allocator/model.hpp"
#include "rta/allocator/solve.hpp"
#include "rta/rng.hpp"

using namespace rta;

namespace {

// Minimal single-task template: S species with given capability rows.
AllocationProblem tiny_problem(const Matrix& Q, const std::vector<int>& species,
                               const Matrix& Y) {
  AllocationProblem p;
  p.capabilities.Q = Q;
  p.capabilities.capability_names.resize(Q.cols(), "cap");
  p.capabilities.species_names.resize(Q.rows(), "species");
  p.mapping =
      SpeciesMapping::from_species_ids(species, static_cast<int>(Q.rows()));
  p.requirements = {Y};
  p.degradation = Matrix::Zero(1, Q.cols());
  p.task_priorities = Vector::Constant(1, 10.0);
  p.transition_costs = Vector::Constant(1, 1.0);
  p.deploy_costs = Vector::Constant(Q.rows(), 0.1);
  p.previous_allocation = IntMatrix::Zero(1, static_cast<int>(species.size()));
  p.discrepancies = Vector::Zero(static_cast<int>(species.size()));
  p.dv_thresh = 0.9;
  p.margin_weight = 1.0;
  p.delta_max = 1000.0;
  return p;
}

}  // namespace

TEST_CASE("model dimensions match the variable bookkeeping") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 2.0;
  auto p = tiny_problem(Q, {0, 0}, Y);
  MiqpModel model = build_model(p);
  CHECK(model.num_A == 2);
  CHECK(model.num_iota == 1);
  CHECK(model.num_phi == 1);
  CHECK(model.n_bin == 4);
  CHECK(model.n_vars == 6);

  // Structural error: requirement width disagrees with U.
  AllocationProblem bad = p;
  bad.requirements = {Matrix::Zero(1, 3)};
  CHECK_THROWS_AS(build_model(bad), std::invalid_argument);
}

TEST_CASE("two robots cover the requirement exactly") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 2.0;
  auto p = tiny_problem(Q, {0, 0}, Y);

  AllocationSolution oracle = enumerate_optimal(p);
  AllocationSolution sol = solve(build_model(p));
  REQUIRE(oracle.feasible);
  REQUIRE(sol.feasible);
  CHECK(oracle.A(0, 0) == 1);
  CHECK(oracle.A(0, 1) == 1);
  CHECK(oracle.phi(0) == 0);
  CHECK(oracle.D(0, 0) == doctest::Approx(0.0));
  CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-12));
  CHECK(check_solution(p, sol).empty());
}

TEST_CASE("unreachable requirement relaxes and minimizes the deficit") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 3.0;
  auto p = tiny_problem(Q, {0, 0}, Y);

  AllocationSolution oracle = enumerate_optimal(p);
  AllocationSolution sol = solve(build_model(p));
  REQUIRE(oracle.feasible);
  REQUIRE(sol.feasible);
  CHECK(oracle.phi(0) == 1);
  CHECK(oracle.D(0, 0) == doctest::Approx(-1.0));
  CHECK(oracle.A.row(0).sum() == 2);  // both assigned, quadratic pushes |delta| down
  CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-12));
}

TEST_CASE("degraded configuration switches to the alternative row") {
  // Config 1 needs ground mobility which is fully degraded; config 2 needs
  // only aerial capability.
  Matrix Q(2, 2);
  Q << 1.0, 0.0,   // ground species: mobility capability 0
       0.0, 1.0;   // aerial species: capability 1
  Matrix Y(2, 2);
  Y << 1.0, 0.0,   // config 1: ground route
       0.0, 1.0;   // config 2: aerial route
  auto p = tiny_problem(Q, {0, 1}, Y);
  p.degradation(0, 0) = 1.0;  // ground capability dead in this task

  AllocationSolution oracle = enumerate_optimal(p);
  REQUIRE(oracle.feasible);
  CHECK(oracle.iota[0](1) == 1);
  CHECK(oracle.phi(0) == 0);

  AllocationSolution sol = solve(build_model(p));
  REQUIRE(sol.feasible);
  CHECK(sol.iota[0](1) == 1);
  CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-12));
}

TEST_CASE("margins formula") {
  Matrix Q(2, 3);
  Q << 10, 2, 0, 10, 0, 5;
  Matrix Y(1, 3);
  Y << 20, 2, 5;
  auto p = tiny_problem(Q, {0, 1}, Y);

  IntMatrix A(1, 2);
  A << 1, 1;
  std::vector<IntVector> iota{IntVector::Ones(1)};
  Matrix D = margins(A, iota, p);
  CHECK(D.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  p.degradation(0, 1) = 1.0;
  D = margins(A, iota, p);
  CHECK(D(0, 0) == doctest::Approx(0.0));
  CHECK(D(0, 1) == doctest::Approx(-2.0));
  CHECK(D(0, 2) == doctest::Approx(0.0));

  // Coverage-style task with zero robots owes its full requirement row.
  Matrix Q5(2, 5);
  Q5 << 5, 1, 3, 0, 5, 2, 3, 0, 1, 8;
  Matrix Y3(1, 5);
  Y3 << 20, 4, 12, 0, 15;
  auto p3 = tiny_problem(Q5, {0, 0, 1}, Y3);
  IntMatrix empty = IntMatrix::Zero(1, 3);
  Matrix D3 = margins(empty, {IntVector::Ones(1)}, p3);
  CHECK(D3(0, 0) == doctest::Approx(-20));
  CHECK(D3(0, 1) == doctest::Approx(-4));
  CHECK(D3(0, 2) == doctest::Approx(-12));
  CHECK(D3(0, 3) == doctest::Approx(0));
  CHECK(D3(0, 4) == doctest::Approx(-15));
}

TEST_CASE("transition term vanishes at the incumbent allocation") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 2.0;
  auto p = tiny_problem(Q, {0, 0}, Y);
  IntMatrix A(1, 2);
  A << 1, 1;
  p.previous_allocation = A;
  std::vector<IntVector> iota{IntVector::Ones(1)};
  IntVector phi = IntVector::Zero(1);
  // deploy 0.2 + no relaxation + zero margin + zero transition
  CHECK(exact_objective(A, iota, phi, p) == doctest::Approx(0.2));
}

TEST_CASE("empty team with zero requirement") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 0.0;
  auto p = tiny_problem(Q, {}, Y);
  AllocationSolution oracle = enumerate_optimal(p);
  REQUIRE(oracle.feasible);
  CHECK(oracle.phi(0) == 0);
  CHECK(oracle.objective == doctest::Approx(0.0));
  CHECK(oracle.D(0, 0) == doctest::Approx(0.0));

  AllocationSolution sol = solve(build_model(p));
  REQUIRE(sol.feasible);
  CHECK(sol.objective == doctest::Approx(0.0));
}

TEST_CASE("deterministic lexicographic winner among exact ties") {
  // One robot, two identical tasks; either assignment has the same cost, so
  // the lexicographic rule must pick task 0 deterministically.
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 1.0;
  AllocationProblem p;
  p.capabilities.Q = Q;
  p.capabilities.capability_names = {"cap"};
  p.capabilities.species_names = {"s"};
  p.mapping = SpeciesMapping::from_species_ids({0}, 1);
  p.requirements = {Y, Y};
  p.degradation = Matrix::Zero(2, 1);
  p.task_priorities = Vector::Constant(2, 5.0);
  p.transition_costs = Vector::Constant(2, 1.0);
  p.deploy_costs = Vector::Constant(1, 0.1);
  p.previous_allocation = IntMatrix::Zero(2, 1);
  p.discrepancies = Vector::Zero(1);
  p.dv_thresh = 0.9;
  p.delta_max = 1000.0;

  AllocationSolution a = enumerate_optimal(p);
  AllocationSolution b = enumerate_optimal(p);
  REQUIRE(a.feasible);
  CHECK(a.A == b.A);
  CHECK(a.phi == b.phi);
  // Both tasks need the robot; one must relax. Relaxing task 1 and serving
  // task 0 is the lexicographic minimum among the equal-cost optima.
  CHECK(a.phi(0) == 0);
  CHECK(a.phi(1) == 1);
  CHECK(a.A(0, 0) == 1);
}

TEST_CASE("excluded robots never appear in a solution") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 2.0;
  auto p = tiny_problem(Q, {0, 0, 0}, Y);
  p.discrepancies(1) = 0.95;  // above threshold 0.9

  AllocationSolution sol = solve(build_model(p));
  REQUIRE(sol.feasible);
  CHECK(sol.A(0, 1) == 0);
  CHECK(sol.A(0, 0) == 1);
  CHECK(sol.A(0, 2) == 1);
  CHECK(check_solution(p, sol).empty());
}

TEST_CASE("graceful degradation relaxes the lower-priority task") {
  // Two tasks each wanting the full team; task 0 carries the higher weight,
  // so task 1 gives way, over a seeded family of team sizes.
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(4));
    Matrix Q(1, 1);
    Q << 1.0;
    Matrix Y(1, 1);
    Y << static_cast<double>(n);
    AllocationProblem p;
    p.capabilities.Q = Q;
    p.capabilities.capability_names = {"cap"};
    p.capabilities.species_names = {"s"};
    p.mapping = SpeciesMapping::from_species_ids(std::vector<int>(n, 0), 1);
    p.requirements = {Y, Y};
    p.degradation = Matrix::Zero(2, 1);
    p.task_priorities = Vector(2);
    p.task_priorities << rng.uniform(50, 100), rng.uniform(1, 40);
    p.transition_costs = Vector::Constant(2, 0.5);
    p.deploy_costs = Vector::Constant(1, 0.01);
    p.previous_allocation = IntMatrix::Zero(2, n);
    p.discrepancies = Vector::Zero(n);
    p.dv_thresh = 0.9;
    p.delta_max = 1000.0;

    AllocationSolution sol = enumerate_optimal(p);
    REQUIRE(sol.feasible);
    CHECK(sol.phi(0) == 0);
    CHECK(sol.phi(1) == 1);
  }
}

TEST_CASE("oracle equivalence on seeded random instances") {
  Rng rng(2024);
  int infeasible_count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng sub = rng.derive(trial);
    AllocationProblem p = random_small_instance(sub);
    AllocationSolution oracle = enumerate_optimal(p);
    SolveSettings settings;
    settings.gap_tol = 1e-12;
    AllocationSolution sol = solve(build_model(p), settings);
    if (!oracle.feasible) {
      ++infeasible_count;
      CHECK_FALSE(sol.feasible);
      continue;
    }
    REQUIRE(sol.feasible);
    CHECK(std::abs(sol.objective - oracle.objective) <= 1e-9);
    CHECK(check_solution(p, sol).empty());
    CHECK(check_solution(p, oracle).empty());
  }
  // The generator must exercise the infeasible path at least occasionally.
  CHECK(infeasible_count > 0);
}

TEST_CASE("root relaxation lower-bounds the optimum") {
  Rng rng(501);
  for (int trial = 0; trial < 40; ++trial) {
    Rng sub = rng.derive(trial);
    AllocationProblem p = random_small_instance(sub);
    AllocationSolution oracle = enumerate_optimal(p);
    if (!oracle.feasible) continue;
    double root = root_relaxation_objective(build_model(p));
    CHECK(root <= oracle.objective + 1e-6);
  }
}

TEST_CASE("corrupted bound hook is detected as a mismatch") {
  Rng rng(77);
  int mismatches = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Rng sub = rng.derive(trial);
    AllocationProblem p = random_small_instance(sub);
    AllocationSolution oracle = enumerate_optimal(p);
    if (!oracle.feasible) continue;
    SolveSettings corrupt;
    corrupt.gap_tol = 1e-12;
    corrupt.corrupt_bound = 50.0;
    AllocationSolution sol = solve(build_model(p), corrupt);
    if (!sol.feasible || std::abs(sol.objective - oracle.objective) > 1e-9) {
      ++mismatches;
    }
  }
  CHECK(mismatches > 0);
}

TEST_CASE("raising the margin weight never raises the squared margin norm") {
  Rng rng(404);
  for (int trial = 0; trial < 8; ++trial) {
    Rng sub = rng.derive(trial);
    AllocationProblem p = random_small_instance(sub);
    double prev_norm = -1.0;
    bool first = true;
    for (double l : {0.05, 0.3, 1.0, 3.0, 10.0}) {
      p.margin_weight = l;
      AllocationSolution sol = enumerate_optimal(p);
      if (!sol.feasible) break;
      double norm = 0.0;
      for (int m = 0; m < sol.D.rows(); ++m) {
        double s = sol.D.row(m).sum();
        norm += s * s;
      }
      if (!first) CHECK(norm <= prev_norm + 1e-9);
      prev_norm = norm;
      first = false;
    }
  }
}

TEST_CASE("enumeration refuses oversized search spaces") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 2.0;
  auto p = tiny_problem(Q, std::vector<int>(30, 0), Y);
  CHECK_THROWS_WITH_AS(enumerate_optimal(p),
                       doctest::Contains("search space"), std::runtime_error);
}

TEST_CASE("infeasibility reports name the constraint family") {
  Matrix Q(1, 1);
  Q << 1.0;
  Matrix Y(1, 1);
  Y << 50.0;
  auto p = tiny_problem(Q, {0, 0}, Y);
  p.delta_max = 5.0;  // even both robots leave a deficit of 48 > 5

  AllocationSolution oracle = enumerate_optimal(p);
  CHECK_FALSE(oracle.feasible);
  CHECK(oracle.infeasibility.find("16") != std::string::npos);

  AllocationSolution sol = solve(build_model(p));
  CHECK_FALSE(sol.feasible);
  CHECK(sol.infeasibility.find("16") != std::string::npos);
}
