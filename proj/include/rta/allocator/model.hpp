#pragma once

#include <vector>

#include "rta/allocator/problem.hpp"
#include "rta/allocator/qp.hpp"

namespace rta {

/// Assembled mixed-integer quadratic program.
///
/// Variable layout (the index order used for branching tie-breaks):
///   [0, M*N)                       A, row-major: var(m,i) = m*N + i
///   [M*N, M*N + sum K_m)           iota, task-major
///   next M                         phi
///   last N                         t, the L1 transition linearization
///
/// The margins are substituted affine expressions, not variables; the
/// quadratic term is l * sum_m (row-sum of delta_m)^2, a positive
/// semidefinite form of rank at most M.
struct MiqpModel {
  AllocationProblem problem;

  int M = 0, N = 0, U = 0, S = 0;
  int num_A = 0, num_iota = 0, num_phi = 0, num_t = 0;
  int n_vars = 0, n_bin = 0;
  std::vector<int> iota_offset;

  Matrix H;
  Vector g;
  std::vector<SparseRow> ineqs;
  std::vector<SparseRow> eqs;
  Vector lb, ub;

  // Robots with identical species, eligibility, and previous-allocation
  // column are interchangeable; grouped here for symmetry-aware search.
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;

  int a_index(int m, int i) const { return m * N + i; }
  int iota_index(int m, int k) const { return iota_offset[m] + k; }
  int phi_index(int m) const { return num_A + num_iota + m; }
  int t_index(int i) const { return num_A + num_iota + num_phi + i; }
};

/// Assembles the allocation program into solver form. Throws
/// std::invalid_argument on structurally invalid input.
MiqpModel build_model(const AllocationProblem& problem);

}  // namespace rta
