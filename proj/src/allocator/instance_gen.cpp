#include "rta/allocator/instance_gen.hpp"

namespace rta {

AllocationProblem random_small_instance(Rng& rng) {
  AllocationProblem p;
  const int S = 1 + static_cast<int>(rng.uniform_int(2));
  const int U = 1 + static_cast<int>(rng.uniform_int(3));
  const int M = 1 + static_cast<int>(rng.uniform_int(2));
  const int N = static_cast<int>(rng.uniform_int(6));  // 0..5

  p.capabilities.Q = Matrix::Zero(S, U);
  for (int s = 0; s < S; ++s) {
    for (int u = 0; u < U; ++u) {
      // Sparse capabilities: some species lack some capabilities entirely.
      p.capabilities.Q(s, u) =
          rng.uniform() < 0.25 ? 0.0 : rng.uniform(0.5, 10.0);
    }
  }
  p.capabilities.capability_names.resize(U);
  p.capabilities.species_names.resize(S);
  for (int u = 0; u < U; ++u) {
    p.capabilities.capability_names[u] = "cap" + std::to_string(u);
  }
  for (int s = 0; s < S; ++s) {
    p.capabilities.species_names[s] = "species" + std::to_string(s);
  }

  std::vector<int> species_ids(N);
  for (int i = 0; i < N; ++i) {
    species_ids[i] = static_cast<int>(rng.uniform_int(S));
  }
  p.mapping = SpeciesMapping::from_species_ids(species_ids, S);
  if (rng.uniform() < 0.3) {
    // Tighter availability than the head count.
    for (int s = 0; s < S; ++s) {
      if (p.mapping.lambda(s) > 0 && rng.uniform() < 0.5) {
        p.mapping.lambda(s) -= 1;
      }
    }
  }

  p.requirements.resize(M);
  p.degradation = Matrix::Zero(M, U);
  p.task_priorities = Vector::Zero(M);
  p.transition_costs = Vector::Zero(M);
  for (int m = 0; m < M; ++m) {
    const int K = 1 + static_cast<int>(rng.uniform_int(2));
    p.requirements[m] = Matrix::Zero(K, U);
    for (int k = 0; k < K; ++k) {
      for (int u = 0; u < U; ++u) {
        p.requirements[m](k, u) =
            rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 12.0);
      }
    }
    for (int u = 0; u < U; ++u) {
      p.degradation(m, u) = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 1.0);
    }
    p.task_priorities(m) = rng.uniform(0.5, 100.0);
    p.transition_costs(m) = rng.uniform(0.0, 20.0);
  }

  p.deploy_costs = Vector::Zero(S);
  for (int s = 0; s < S; ++s) p.deploy_costs(s) = rng.uniform(0.01, 2.0);

  p.previous_allocation = IntMatrix::Zero(M, N);
  for (int i = 0; i < N; ++i) {
    int prev = static_cast<int>(rng.uniform_int(M + 1));
    if (prev < M) p.previous_allocation(prev, i) = 1;
  }

  p.discrepancies = Vector::Zero(N);
  for (int i = 0; i < N; ++i) p.discrepancies(i) = rng.uniform();
  p.dv_thresh = rng.uniform(0.3, 1.0);

  p.margin_weight = rng.uniform(0.1, 2.0);
  p.delta_max = rng.uniform() < 0.25 ? rng.uniform(1.0, 8.0) : 1000.0;
  return p;
}

}  // namespace rta
