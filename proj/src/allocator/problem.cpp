#include "rta/allocator/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace rta {

int AllocationProblem::eligibility(int robot) const {
  double cap = std::floor(1.0 + dv_thresh - discrepancies(robot) + 1e-12);
  if (cap < 0.0) return 0;
  if (cap > 1.0) return 1;
  return static_cast<int>(cap);
}

void AllocationProblem::validate() const {
  const int M = num_tasks();
  const int N = num_robots();
  const int U = num_capabilities();
  const int S = num_species();
  if (M < 1) throw std::invalid_argument("problem needs at least one task");
  if (capabilities.Q.rows() != S) {
    throw std::invalid_argument("species mapping vs capability matrix mismatch");
  }
  for (int m = 0; m < M; ++m) {
    if (requirements[m].rows() < 1 || requirements[m].cols() != U) {
      throw std::invalid_argument("requirement matrix of task " +
                                  std::to_string(m) +
                                  " has wrong shape (needs K_m >= 1 rows, U "
                                  "columns)");
    }
    if (requirements[m].minCoeff() < 0.0) {
      throw std::invalid_argument("requirement matrix of task " +
                                  std::to_string(m) + " has negative entries");
    }
  }
  if (degradation.rows() != M || degradation.cols() != U) {
    throw std::invalid_argument("degradation matrix has wrong shape");
  }
  if (degradation.size() > 0 &&
      (degradation.minCoeff() < 0.0 || degradation.maxCoeff() > 1.0)) {
    throw std::invalid_argument("degradation entries outside [0,1]");
  }
  if (task_priorities.size() != M || transition_costs.size() != M) {
    throw std::invalid_argument("per-task weight vectors have wrong length");
  }
  if (deploy_costs.size() != S) {
    throw std::invalid_argument("deployment cost vector has wrong length");
  }
  if (previous_allocation.rows() != M || previous_allocation.cols() != N) {
    throw std::invalid_argument("previous allocation has wrong shape");
  }
  for (int i = 0; i < N; ++i) {
    if (previous_allocation.col(i).sum() > 1) {
      throw std::invalid_argument("previous allocation assigns a robot twice");
    }
  }
  if (discrepancies.size() != N) {
    throw std::invalid_argument("discrepancy vector has wrong length");
  }
  if (margin_weight < 0.0 || delta_max <= 0.0) {
    throw std::invalid_argument("margin weight must be >= 0, delta_max > 0");
  }
}

Matrix margins(const IntMatrix& A, const std::vector<IntVector>& iota,
               const AllocationProblem& problem) {
  const int M = problem.num_tasks();
  const int U = problem.num_capabilities();
  Matrix D(M, U);
  for (int m = 0; m < M; ++m) {
    Vector c = aggregate_capabilities(A.row(m).transpose(), problem.mapping,
                                      problem.capabilities);
    Vector c_hat = effective_capabilities(
        c, problem.degradation.row(m).transpose());
    Vector required = Vector::Zero(U);
    for (int k = 0; k < iota[m].size(); ++k) {
      if (iota[m](k) != 0) required += problem.requirements[m].row(k).transpose();
    }
    D.row(m) = (c_hat - required).transpose();
  }
  return D;
}

double exact_objective(const IntMatrix& A, const std::vector<IntVector>& iota,
                       const IntVector& phi,
                       const AllocationProblem& problem) {
  const int M = problem.num_tasks();
  const int N = problem.num_robots();
  double deploy = 0.0;
  for (int i = 0; i < N; ++i) {
    int s = problem.mapping.species_of(i);
    for (int m = 0; m < M; ++m) {
      if (A(m, i) != 0) deploy += problem.deploy_costs(s);
    }
  }
  double relax = 0.0;
  for (int m = 0; m < M; ++m) relax += problem.task_priorities(m) * phi(m);

  Matrix D = margins(A, iota, problem);
  double margin_term = 0.0;
  for (int m = 0; m < M; ++m) {
    double row_sum = D.row(m).sum();
    margin_term += row_sum * row_sum;
  }

  double transition = 0.0;
  for (int i = 0; i < N; ++i) {
    double delta = 0.0;
    for (int m = 0; m < M; ++m) {
      delta += problem.transition_costs(m) *
               (A(m, i) - problem.previous_allocation(m, i));
    }
    transition += std::abs(delta);
  }
  return deploy + relax + problem.margin_weight * margin_term + transition;
}

std::vector<std::string> check_solution(const AllocationProblem& problem,
                                        const AllocationSolution& solution) {
  std::vector<std::string> violations;
  if (!solution.feasible) {
    violations.push_back("solution flagged infeasible");
    return violations;
  }
  const int M = problem.num_tasks();
  const int N = problem.num_robots();
  const int U = problem.num_capabilities();

  if (solution.A.rows() != M || solution.A.cols() != N) {
    violations.push_back("allocation matrix has wrong shape");
    return violations;
  }
  for (int i = 0; i < N; ++i) {
    int col = solution.A.col(i).sum();
    if (col > 1) violations.push_back("robot assigned to two tasks");
    if (col > problem.eligibility(i)) {
      violations.push_back("robot " + std::to_string(i) +
                           " allocated despite discrepancy above threshold");
    }
  }
  for (int m = 0; m < M; ++m) {
    if (solution.iota[m].sum() != 1) {
      violations.push_back("task " + std::to_string(m) +
                           " does not select exactly one configuration");
    }
  }
  IntVector species_load = IntVector::Zero(problem.num_species());
  for (int i = 0; i < N; ++i) {
    if (solution.A.col(i).sum() > 0) {
      species_load(problem.mapping.species_of(i)) += 1;
    }
  }
  for (int s = 0; s < problem.num_species(); ++s) {
    if (species_load(s) > problem.mapping.lambda(s)) {
      violations.push_back("species " + std::to_string(s) +
                           " exceeds its availability");
    }
  }
  Matrix D = margins(solution.A, solution.iota, problem);
  if ((D - solution.D).cwiseAbs().maxCoeff() > 1e-9) {
    violations.push_back("reported margins do not match the allocation");
  }
  for (int m = 0; m < M; ++m) {
    double floor_m = -solution.phi(m) * problem.delta_max;
    for (int u = 0; u < U; ++u) {
      if (D(m, u) < floor_m - 1e-9) {
        violations.push_back("margin of task " + std::to_string(m) +
                             ", capability " + std::to_string(u) +
                             " violates its relaxation floor");
      }
    }
  }
  return violations;
}

bool lex_less(const AllocationSolution& a, const AllocationSolution& b) {
  for (int m = 0; m < a.phi.size(); ++m) {
    if (a.phi(m) != b.phi(m)) return a.phi(m) < b.phi(m);
  }
  for (int m = 0; m < a.A.rows(); ++m) {
    for (int i = 0; i < a.A.cols(); ++i) {
      if (a.A(m, i) != b.A(m, i)) return a.A(m, i) < b.A(m, i);
    }
  }
  for (std::size_t m = 0; m < a.iota.size(); ++m) {
    for (int k = 0; k < a.iota[m].size(); ++k) {
      if (a.iota[m](k) != b.iota[m](k)) return a.iota[m](k) < b.iota[m](k);
    }
  }
  return false;
}

}  // namespace rta
