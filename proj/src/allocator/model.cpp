#include "rta/allocator/model.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace rta {

MiqpModel build_model(const AllocationProblem& problem) {
  problem.validate();
  MiqpModel model;
  model.problem = problem;
  const int M = model.M = problem.num_tasks();
  const int N = model.N = problem.num_robots();
  const int U = model.U = problem.num_capabilities();
  const int S = model.S = problem.num_species();

  model.num_A = M * N;
  model.iota_offset.resize(M);
  int offset = model.num_A;
  for (int m = 0; m < M; ++m) {
    model.iota_offset[m] = offset;
    offset += static_cast<int>(problem.requirements[m].rows());
  }
  model.num_iota = offset - model.num_A;
  model.num_phi = M;
  model.num_t = N;
  model.n_bin = model.num_A + model.num_iota + model.num_phi;
  model.n_vars = model.n_bin + model.num_t;

  // Linear objective: deployment per assignment, w_J per relaxation flag,
  // unit cost on every transition variable.
  model.g = Vector::Zero(model.n_vars);
  for (int m = 0; m < M; ++m) {
    for (int i = 0; i < N; ++i) {
      model.g(model.a_index(m, i)) =
          problem.deploy_costs(problem.mapping.species_of(i));
    }
    model.g(model.phi_index(m)) = problem.task_priorities(m);
  }
  for (int i = 0; i < N; ++i) model.g(model.t_index(i)) = 1.0;

  // Quadratic term: l * sum_m (a_m'x)^2 with a_m the affine row-sum of the
  // task's margin vector.
  model.H = Matrix::Zero(model.n_vars, model.n_vars);
  for (int m = 0; m < M; ++m) {
    Vector a = Vector::Zero(model.n_vars);
    for (int i = 0; i < N; ++i) {
      int s = problem.mapping.species_of(i);
      double w = 0.0;
      for (int u = 0; u < U; ++u) {
        w += (1.0 - problem.degradation(m, u)) * problem.capabilities.Q(s, u);
      }
      a(model.a_index(m, i)) = w;
    }
    for (int k = 0; k < problem.requirements[m].rows(); ++k) {
      a(model.iota_index(m, k)) = -problem.requirements[m].row(k).sum();
    }
    model.H += 2.0 * problem.margin_weight * a * a.transpose();
  }

  // Relaxation floor rows: delta_mu + phi_m * delta_max >= 0. Since the
  // effective capabilities are nonnegative, delta_mu >= -max_k Y*_m(k,u)
  // holds at every integral point, so the phi coefficient can be capped
  // there; the integral feasible set is unchanged and the relaxation loses
  // the big-M slack that fractional phi would otherwise buy.
  for (int m = 0; m < M; ++m) {
    for (int u = 0; u < U; ++u) {
      SparseRow row;
      for (int i = 0; i < N; ++i) {
        int s = problem.mapping.species_of(i);
        double coeff =
            (1.0 - problem.degradation(m, u)) * problem.capabilities.Q(s, u);
        if (coeff != 0.0) row.coeffs.emplace_back(model.a_index(m, i), coeff);
      }
      for (int k = 0; k < problem.requirements[m].rows(); ++k) {
        double coeff = -problem.requirements[m](k, u);
        if (coeff != 0.0) row.coeffs.emplace_back(model.iota_index(m, k), coeff);
      }
      double big_m = std::min(problem.delta_max,
                              problem.requirements[m].col(u).maxCoeff());
      row.coeffs.emplace_back(model.phi_index(m), big_m);
      row.rhs = 0.0;
      model.ineqs.push_back(std::move(row));
    }
  }

  // Species availability: sum of assignments per species <= lambda.
  for (int s = 0; s < S; ++s) {
    SparseRow row;
    for (int i = 0; i < N; ++i) {
      if (problem.mapping.species_of(i) != s) continue;
      for (int m = 0; m < M; ++m) {
        row.coeffs.emplace_back(model.a_index(m, i), -1.0);
      }
    }
    row.rhs = -static_cast<double>(problem.mapping.lambda(s));
    if (!row.coeffs.empty()) model.ineqs.push_back(std::move(row));
  }

  model.lb = Vector::Zero(model.n_vars);
  model.ub = Vector::Ones(model.n_vars);
  double t_cap = 1.0;
  if (M > 0) t_cap += 2.0 * problem.transition_costs.maxCoeff();
  for (int i = 0; i < N; ++i) model.ub(model.t_index(i)) = t_cap;

  // Per-robot exclusion, integer form: an ineligible robot's column is fixed
  // to zero; eligible robots get the one-task-at-most row.
  for (int i = 0; i < N; ++i) {
    if (problem.eligibility(i) == 0) {
      for (int m = 0; m < M; ++m) model.ub(model.a_index(m, i)) = 0.0;
      continue;
    }
    SparseRow row;
    for (int m = 0; m < M; ++m) {
      row.coeffs.emplace_back(model.a_index(m, i), -1.0);
    }
    row.rhs = -1.0;
    model.ineqs.push_back(std::move(row));
  }

  // Transition linearization: t_i >= +-sum_m T_mm (A_mi - Ap_mi).
  for (int i = 0; i < N; ++i) {
    double prev = 0.0;
    for (int m = 0; m < M; ++m) {
      prev += problem.transition_costs(m) * problem.previous_allocation(m, i);
    }
    SparseRow up, down;
    up.coeffs.emplace_back(model.t_index(i), 1.0);
    down.coeffs.emplace_back(model.t_index(i), 1.0);
    for (int m = 0; m < M; ++m) {
      double tc = problem.transition_costs(m);
      if (tc != 0.0) {
        up.coeffs.emplace_back(model.a_index(m, i), -tc);
        down.coeffs.emplace_back(model.a_index(m, i), tc);
      }
    }
    up.rhs = -prev;
    down.rhs = prev;
    model.ineqs.push_back(std::move(up));
    model.ineqs.push_back(std::move(down));
  }

  // Exactly one configuration per task.
  for (int m = 0; m < M; ++m) {
    SparseRow row;
    for (int k = 0; k < problem.requirements[m].rows(); ++k) {
      row.coeffs.emplace_back(model.iota_index(m, k), 1.0);
    }
    row.rhs = 1.0;
    model.eqs.push_back(std::move(row));
  }

  // Interchangeable-robot classes.
  std::map<std::tuple<int, int, std::vector<int>>, int> key_to_class;
  model.class_of.resize(N);
  for (int i = 0; i < N; ++i) {
    std::vector<int> prev_col(M);
    for (int m = 0; m < M; ++m) prev_col[m] = problem.previous_allocation(m, i);
    auto key = std::make_tuple(problem.mapping.species_of(i),
                               problem.eligibility(i), std::move(prev_col));
    auto it = key_to_class.find(key);
    if (it == key_to_class.end()) {
      it = key_to_class.emplace(key, static_cast<int>(model.classes.size()))
               .first;
      model.classes.emplace_back();
    }
    model.class_of[i] = it->second;
    model.classes[it->second].push_back(i);
  }
  return model;
}

}  // namespace rta
