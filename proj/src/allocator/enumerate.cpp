#include <cmath>
#include <limits>
#include <stdexcept>

#include "rta/allocator/solve.hpp"

namespace rta {

namespace {

// Best configuration and relaxation flag for one task given its effective
// capabilities; the per-task pick is exact because the objective couples
// iota_m and phi_m only within task m. Ties prefer (phi, k) ascending,
// matching the global lexicographic rule. Returns false if no configuration
// fits even fully relaxed.
bool best_task_config(const AllocationProblem& problem, int m,
                      const Vector& c_hat, int& k_best, int& phi_best,
                      double& cost_best, Vector& delta_best) {
  const Matrix& req = problem.requirements[m];
  bool found = false;
  for (int k = 0; k < req.rows(); ++k) {
    Vector delta = c_hat - req.row(k).transpose();
    double min_margin = delta.minCoeff();
    for (int phi = 0; phi <= 1; ++phi) {
      if (min_margin < -phi * problem.delta_max - 1e-12) continue;
      double s = delta.sum();
      double cost = problem.task_priorities(m) * phi +
                    problem.margin_weight * s * s;
      if (!found || cost < cost_best - 1e-15) {
        found = true;
        cost_best = cost;
        k_best = k;
        phi_best = phi;
        delta_best = delta;
      }
      break;  // phi = 1 can only match the phi = 0 cost, never beat it
    }
  }
  return found;
}

}  // namespace

AllocationSolution enumerate_optimal(const AllocationProblem& problem) {
  problem.validate();
  const int M = problem.num_tasks();
  const int N = problem.num_robots();

  double space = std::pow(static_cast<double>(M + 1), N) *
                 std::pow(2.0, M);
  for (int m = 0; m < M; ++m) space *= problem.requirements[m].rows();
  if (space > 1e7) {
    throw std::runtime_error(
        "enumerate_optimal: search space of " + std::to_string(space) +
        " states exceeds the 1e7 limit");
  }

  std::vector<int> eligible(N);
  for (int i = 0; i < N; ++i) eligible[i] = problem.eligibility(i);

  AllocationSolution best;
  double best_obj = std::numeric_limits<double>::infinity();

  std::vector<int> assign(N, -1);  // -1 = idle, else task id
  bool done = N > 0 ? false : true;
  bool first_pass = true;
  while (!done || first_pass) {
    first_pass = false;

    // Species usage against lambda.
    bool ok = true;
    IntVector load = IntVector::Zero(problem.num_species());
    for (int i = 0; i < N && ok; ++i) {
      if (assign[i] < 0) continue;
      if (!eligible[i]) ok = false;
      load(problem.mapping.species_of(i)) += 1;
    }
    for (int s = 0; s < problem.num_species() && ok; ++s) {
      if (load(s) > problem.mapping.lambda(s)) ok = false;
    }

    if (ok) {
      IntMatrix A = IntMatrix::Zero(M, N);
      for (int i = 0; i < N; ++i) {
        if (assign[i] >= 0) A(assign[i], i) = 1;
      }
      double acc = 0.0;
      std::vector<IntVector> iota(M);
      IntVector phi = IntVector::Zero(M);
      bool feasible = true;
      for (int m = 0; m < M && feasible; ++m) {
        Vector c = aggregate_capabilities(A.row(m).transpose(),
                                          problem.mapping,
                                          problem.capabilities);
        Vector c_hat =
            effective_capabilities(c, problem.degradation.row(m).transpose());
        int k = 0, ph = 0;
        double cost = 0.0;
        Vector delta;
        if (!best_task_config(problem, m, c_hat, k, ph, cost, delta)) {
          feasible = false;
          break;
        }
        iota[m] = IntVector::Zero(problem.requirements[m].rows());
        iota[m](k) = 1;
        phi(m) = ph;
        acc += cost;
      }
      if (feasible) {
        double obj = acc;
        for (int i = 0; i < N; ++i) {
          if (assign[i] >= 0) {
            obj += problem.deploy_costs(problem.mapping.species_of(i));
          }
          double shift = 0.0;
          for (int m = 0; m < M; ++m) {
            shift += problem.transition_costs(m) *
                     (A(m, i) - problem.previous_allocation(m, i));
          }
          obj += std::abs(shift);
        }
        if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj)) ||
            !best.feasible) {
          best.feasible = true;
          best.A = A;
          best.iota = iota;
          best.phi = phi;
          best.objective = obj;
          best_obj = obj;
        } else if (obj <= best_obj + 1e-12 * (1.0 + std::abs(best_obj))) {
          AllocationSolution cand;
          cand.feasible = true;
          cand.A = A;
          cand.iota = iota;
          cand.phi = phi;
          cand.objective = obj;
          if (lex_less(cand, best)) {
            best = cand;
            best_obj = obj;
          }
        }
      }
    }

    // Advance the mixed-radix assignment counter; ineligible robots only
    // ever hold the idle digit.
    done = true;
    for (int i = 0; i < N; ++i) {
      if (!eligible[i]) continue;
      if (assign[i] + 1 < M) {
        assign[i] += 1;
        done = false;
        break;
      }
      assign[i] = -1;
    }
  }

  if (!best.feasible) {
    best.infeasibility = diagnose_infeasibility(problem);
    return best;
  }
  best.D = margins(best.A, best.iota, problem);
  return best;
}

}  // namespace rta
