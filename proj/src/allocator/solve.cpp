#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>

#include "rta/allocator/solve.hpp"

namespace rta {

namespace {

constexpr double kIntegralityTol = 1e-7;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

// The solver works in aggregated coordinates: robots of one class (identical
// species, eligibility, and previous column) are interchangeable, so every
// objective term and constraint depends on the assignment only through the
// per-class-per-task counts. Even the L1 transition cost is exactly linear
// here, because all members of a class share one previous task. Relaxing
// integer counts to their boxes gives the same bound as relaxing the binary
// assignment matrix, at a dimension independent of the team size.
struct CountModel {
  const MiqpModel* binary = nullptr;
  int C = 0, M = 0;
  std::vector<int> class_size, class_prev, class_species;
  std::vector<char> class_eligible;

  int num_counts = 0, num_iota = 0, num_phi = 0, n_vars = 0;
  std::vector<int> iota_offset;

  Matrix H;
  Vector g;
  double obj_const = 0.0;
  std::vector<SparseRow> ineqs;
  std::vector<SparseRow> eqs;
  Vector lb, ub;

  int count_index(int c, int m) const { return c * M + m; }
  int iota_index(int m, int k) const { return iota_offset[m] + k; }
  int phi_index(int m) const { return num_counts + num_iota + m; }

  // Capability weight of one class toward one task's margin sum.
  std::vector<std::vector<double>> count_weight;  // [m][c]
  // Sorted attainable margin-sum values per (task, configuration): the
  // species-count lattice of sum_c w n_c minus the requirement row sum.
  std::vector<std::vector<std::vector<double>>> margin_lattice;  // [m][k]
};

CountModel build_count_model(const MiqpModel& model) {
  const AllocationProblem& p = model.problem;
  CountModel cm;
  cm.binary = &model;
  cm.C = static_cast<int>(model.classes.size());
  cm.M = model.M;
  cm.class_size.resize(cm.C);
  cm.class_prev.resize(cm.C);
  cm.class_species.resize(cm.C);
  cm.class_eligible.resize(cm.C);
  for (int c = 0; c < cm.C; ++c) {
    int first = model.classes[c].front();
    cm.class_size[c] = static_cast<int>(model.classes[c].size());
    cm.class_species[c] = p.mapping.species_of(first);
    cm.class_eligible[c] = static_cast<char>(p.eligibility(first));
    cm.class_prev[c] = -1;
    for (int m = 0; m < cm.M; ++m) {
      if (p.previous_allocation(m, first)) cm.class_prev[c] = m;
    }
  }

  cm.num_counts = cm.C * cm.M;
  cm.iota_offset.resize(cm.M);
  int offset = cm.num_counts;
  for (int m = 0; m < cm.M; ++m) {
    cm.iota_offset[m] = offset;
    offset += static_cast<int>(p.requirements[m].rows());
  }
  cm.num_iota = offset - cm.num_counts;
  cm.num_phi = cm.M;
  cm.n_vars = cm.num_counts + cm.num_iota + cm.num_phi;

  // Linear objective: deployment plus the exact per-class transition cost.
  // A class previously in task q pays |T_m - T_q| per member moved to m and
  // T_q per member released to idle, so with the constant sum folded out the
  // per-count coefficient is |T_m - T_q| - T_q (just T_m for idle classes).
  cm.g = Vector::Zero(cm.n_vars);
  cm.obj_const = 0.0;
  for (int c = 0; c < cm.C; ++c) {
    int q = cm.class_prev[c];
    if (q >= 0) cm.obj_const += p.transition_costs(q) * cm.class_size[c];
    for (int m = 0; m < cm.M; ++m) {
      double trans =
          q >= 0 ? std::abs(p.transition_costs(m) - p.transition_costs(q)) -
                       p.transition_costs(q)
                 : p.transition_costs(m);
      cm.g(cm.count_index(c, m)) =
          p.deploy_costs(cm.class_species[c]) + trans;
    }
  }
  for (int m = 0; m < cm.M; ++m) cm.g(cm.phi_index(m)) = p.task_priorities(m);

  // Quadratic margin-sum term, in count coordinates.
  cm.H = Matrix::Zero(cm.n_vars, cm.n_vars);
  for (int m = 0; m < cm.M; ++m) {
    Vector a = Vector::Zero(cm.n_vars);
    for (int c = 0; c < cm.C; ++c) {
      double w = 0.0;
      for (int u = 0; u < model.U; ++u) {
        w += (1.0 - p.degradation(m, u)) *
             p.capabilities.Q(cm.class_species[c], u);
      }
      a(cm.count_index(c, m)) = w;
    }
    for (int k = 0; k < p.requirements[m].rows(); ++k) {
      a(cm.iota_index(m, k)) = -p.requirements[m].row(k).sum();
    }
    cm.H += 2.0 * p.margin_weight * a * a.transpose();
  }

  // Capability floors with the capped big-M on phi.
  for (int m = 0; m < cm.M; ++m) {
    for (int u = 0; u < model.U; ++u) {
      SparseRow row;
      for (int c = 0; c < cm.C; ++c) {
        double coeff = (1.0 - p.degradation(m, u)) *
                       p.capabilities.Q(cm.class_species[c], u);
        if (coeff != 0.0) row.coeffs.emplace_back(cm.count_index(c, m), coeff);
      }
      for (int k = 0; k < p.requirements[m].rows(); ++k) {
        double coeff = -p.requirements[m](k, u);
        if (coeff != 0.0) row.coeffs.emplace_back(cm.iota_index(m, k), coeff);
      }
      double big_m =
          std::min(p.delta_max, p.requirements[m].col(u).maxCoeff());
      row.coeffs.emplace_back(cm.phi_index(m), big_m);
      row.rhs = 0.0;
      cm.ineqs.push_back(std::move(row));
    }
  }
  // Class totals and species availability.
  for (int c = 0; c < cm.C; ++c) {
    SparseRow row;
    for (int m = 0; m < cm.M; ++m) {
      row.coeffs.emplace_back(cm.count_index(c, m), -1.0);
    }
    row.rhs = -static_cast<double>(cm.class_size[c]);
    cm.ineqs.push_back(std::move(row));
  }
  for (int s = 0; s < p.num_species(); ++s) {
    SparseRow row;
    for (int c = 0; c < cm.C; ++c) {
      if (cm.class_species[c] != s) continue;
      for (int m = 0; m < cm.M; ++m) {
        row.coeffs.emplace_back(cm.count_index(c, m), -1.0);
      }
    }
    row.rhs = -static_cast<double>(p.mapping.lambda(s));
    if (!row.coeffs.empty()) cm.ineqs.push_back(std::move(row));
  }
  for (int m = 0; m < cm.M; ++m) {
    SparseRow row;
    for (int k = 0; k < p.requirements[m].rows(); ++k) {
      row.coeffs.emplace_back(cm.iota_index(m, k), 1.0);
    }
    row.rhs = 1.0;
    cm.eqs.push_back(std::move(row));
  }

  cm.lb = Vector::Zero(cm.n_vars);
  cm.ub = Vector::Ones(cm.n_vars);
  for (int c = 0; c < cm.C; ++c) {
    for (int m = 0; m < cm.M; ++m) {
      cm.ub(cm.count_index(c, m)) =
          cm.class_eligible[c] ? static_cast<double>(cm.class_size[c]) : 0.0;
    }
  }

  // Margin-sum weights and the attainable value lattice per configuration,
  // computed from per-species availability (a superset of what any node can
  // reach, which keeps the secant bound valid everywhere).
  cm.count_weight.assign(cm.M, std::vector<double>(cm.C, 0.0));
  for (int m = 0; m < cm.M; ++m) {
    for (int c = 0; c < cm.C; ++c) {
      double w = 0.0;
      for (int u = 0; u < model.U; ++u) {
        w += (1.0 - p.degradation(m, u)) *
             p.capabilities.Q(cm.class_species[c], u);
      }
      cm.count_weight[m][c] = w;
    }
  }
  const int S = p.num_species();
  std::vector<int> avail(S, 0);
  for (int c = 0; c < cm.C; ++c) {
    if (cm.class_eligible[c]) avail[cm.class_species[c]] += cm.class_size[c];
  }
  for (int s = 0; s < S; ++s) avail[s] = std::min(avail[s], p.mapping.lambda(s));
  cm.margin_lattice.resize(cm.M);
  for (int m = 0; m < cm.M; ++m) {
    std::vector<double> species_w(S, 0.0);
    for (int u = 0; u < model.U; ++u) {
      for (int s = 0; s < S; ++s) {
        species_w[s] +=
            (1.0 - p.degradation(m, u)) * p.capabilities.Q(s, u);
      }
    }
    std::vector<double> sums{0.0};
    for (int s = 0; s < S; ++s) {
      std::vector<double> extended;
      extended.reserve(sums.size() * (avail[s] + 1));
      for (double base : sums) {
        for (int n = 0; n <= avail[s]; ++n) {
          extended.push_back(base + n * species_w[s]);
        }
      }
      sums = std::move(extended);
      if (sums.size() > 20000) break;  // degenerate teams: skip the cut
    }
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end(),
                           [](double a, double b) { return b - a < 1e-9; }),
               sums.end());
    const int K = static_cast<int>(p.requirements[m].rows());
    cm.margin_lattice[m].resize(K);
    if (sums.size() > 20000) continue;
    for (int k = 0; k < K; ++k) {
      double r = p.requirements[m].row(k).sum();
      auto& lattice = cm.margin_lattice[m][k];
      lattice.reserve(sums.size());
      for (double v : sums) lattice.push_back(v - r);
    }
  }
  return cm;
}

struct Node {
  long id = 0;
  double bound = -kInfinity;
  // Box tightenings accumulated by branching: count windows and binary fixes
  // share one representation (lo == hi pins a variable).
  std::vector<std::array<double, 3>> bounds;  // {var, lo, hi}
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

struct NodeQp {
  QpProblem qp;
  std::vector<int> full_of;
  std::vector<int> reduced_of;
  Vector fixed_values;
  double obj_const = 0.0;
  bool infeasible = false;
};

NodeQp assemble_node(const CountModel& cm, const Node& node, const Matrix& H,
                     const Vector& g, double const0) {
  NodeQp out;
  const int n = cm.n_vars;
  Vector lb = cm.lb, ub = cm.ub;
  for (const auto& b : node.bounds) {
    int var = static_cast<int>(b[0]);
    lb(var) = std::max(lb(var), b[1]);
    ub(var) = std::min(ub(var), b[2]);
    if (lb(var) > ub(var) + 1e-9) {
      out.infeasible = true;
      return out;
    }
  }

  out.fixed_values = Vector::Zero(n);
  out.reduced_of.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (ub(j) - lb(j) < 1e-9) {
      out.fixed_values(j) = lb(j);
    } else {
      out.reduced_of[j] = static_cast<int>(out.full_of.size());
      out.full_of.push_back(j);
    }
  }
  const int nf = static_cast<int>(out.full_of.size());
  out.qp.n = nf;
  out.qp.H = Matrix::Zero(nf, nf);
  out.qp.g = Vector::Zero(nf);
  out.qp.lb = Vector::Zero(nf);
  out.qp.ub = Vector::Zero(nf);
  const bool quadratic = H.size() > 0;
  for (int a = 0; a < nf; ++a) {
    int fa = out.full_of[a];
    out.qp.g(a) = g(fa);
    out.qp.lb(a) = lb(fa);
    out.qp.ub(a) = ub(fa);
    if (quadratic) {
      for (int b = 0; b < nf; ++b) out.qp.H(a, b) = H(fa, out.full_of[b]);
    }
  }
  out.obj_const = const0;
  for (int j = 0; j < n; ++j) {
    if (out.reduced_of[j] >= 0) continue;
    double v = out.fixed_values(j);
    if (v == 0.0) continue;
    out.obj_const += g(j) * v;
    if (quadratic) {
      for (int j2 = 0; j2 < n; ++j2) {
        if (out.reduced_of[j2] >= 0) continue;
        out.obj_const += 0.5 * H(j, j2) * v * out.fixed_values(j2);
      }
      for (int a = 0; a < nf; ++a) {
        out.qp.g(a) += H(out.full_of[a], j) * v;
      }
    }
  }

  auto reduce_row = [&](const SparseRow& row, SparseRow& reduced) {
    reduced.coeffs.clear();
    reduced.rhs = row.rhs;
    for (const auto& [j, v] : row.coeffs) {
      if (out.reduced_of[j] >= 0) {
        reduced.coeffs.emplace_back(out.reduced_of[j], v);
      } else {
        reduced.rhs -= v * out.fixed_values(j);
      }
    }
  };
  SparseRow reduced;
  for (const auto& row : cm.ineqs) {
    reduce_row(row, reduced);
    if (reduced.coeffs.empty()) {
      if (reduced.rhs > 1e-9) out.infeasible = true;
      continue;
    }
    out.qp.ineq.push_back(reduced);
  }
  for (const auto& row : cm.eqs) {
    reduce_row(row, reduced);
    if (reduced.coeffs.empty()) {
      if (std::abs(reduced.rhs) > 1e-9) out.infeasible = true;
      continue;
    }
    out.qp.eq.push_back(reduced);
  }
  return out;
}

NodeQp build_node_qp(const CountModel& cm, const Node& node) {
  return assemble_node(cm, node, cm.H, cm.g, cm.obj_const);
}

// The effective box of a variable inside a node.
std::pair<double, double> effective_bounds(const CountModel& cm,
                                           const Node& node, int var) {
  double lo = cm.lb(var), hi = cm.ub(var);
  for (const auto& b : node.bounds) {
    if (static_cast<int>(b[0]) == var) {
      lo = std::max(lo, b[1]);
      hi = std::min(hi, b[2]);
    }
  }
  return {lo, hi};
}

// Secant bound: at an integral solution each task's margin sum lies on a
// known lattice, and x^2 is bounded below by the secant through the lattice
// points bracketing the relaxed value. Dropping the parabola in favor of
// those secants (and zero for tasks whose configuration is still open)
// yields a linear program whose value is a valid lower bound on every
// integral point of the node, often far above the plain relaxation.
double secant_bound(const CountModel& cm, const Node& node,
                    const Vector& x_full) {
  const AllocationProblem& p = cm.binary->problem;
  const double l = p.margin_weight;
  Vector g = cm.g;
  double const0 = cm.obj_const;
  bool any_cut = false;
  if (l > 0.0) {
    for (int m = 0; m < cm.M; ++m) {
      const int K = static_cast<int>(p.requirements[m].rows());
      // Attainable margin sums: union of the per-configuration lattices
      // still allowed in this node.
      std::vector<double> lattice;
      bool usable = true;
      for (int k = 0; k < K; ++k) {
        auto [lo, hi] = effective_bounds(cm, node, cm.iota_index(m, k));
        if (hi < 0.5) continue;  // configuration excluded here
        if (cm.margin_lattice[m][k].size() < 2) {
          usable = false;
          break;
        }
        lattice.insert(lattice.end(), cm.margin_lattice[m][k].begin(),
                       cm.margin_lattice[m][k].end());
      }
      if (!usable || lattice.size() < 2) continue;
      std::sort(lattice.begin(), lattice.end());

      double s_star = 0.0;
      for (int c = 0; c < cm.C; ++c) {
        s_star += cm.count_weight[m][c] * x_full(cm.count_index(c, m));
      }
      for (int k = 0; k < K; ++k) {
        s_star -=
            p.requirements[m].row(k).sum() * x_full(cm.iota_index(m, k));
      }
      auto it = std::lower_bound(lattice.begin(), lattice.end(), s_star);
      if (it == lattice.begin() || it == lattice.end()) continue;
      double s_hi = *it;
      double s_lo = *(it - 1);
      if (s_hi - s_lo < 1e-9) continue;
      double alpha = s_lo + s_hi;   // secant of x^2: slope
      double beta = -s_lo * s_hi;   // and intercept
      for (int c = 0; c < cm.C; ++c) {
        g(cm.count_index(c, m)) += l * alpha * cm.count_weight[m][c];
      }
      for (int k = 0; k < K; ++k) {
        g(cm.iota_index(m, k)) -= l * alpha * p.requirements[m].row(k).sum();
      }
      const0 += l * beta;
      any_cut = true;
    }
  }
  if (!any_cut) return -kInfinity;
  NodeQp lp = assemble_node(cm, node, Matrix(), g, const0);
  if (lp.infeasible) return kInfinity;
  QpResult res = solve_qp(lp.qp, {1e-9, 80});
  if (res.status != QpStatus::optimal) return -kInfinity;
  double obj = res.objective + lp.obj_const;
  return obj - 1e-8 * (1.0 + std::abs(obj));
}

Vector full_solution(const CountModel& cm, const NodeQp& nq,
                     const Vector& x_reduced) {
  Vector x = nq.fixed_values;
  for (int a = 0; a < static_cast<int>(nq.full_of.size()); ++a) {
    x(nq.full_of[a]) = x_reduced(a);
  }
  (void)cm;
  return x;
}

// Canonical member-level assignment realizing per-class task counts; members
// are interchangeable, so filling tasks in ascending order from the lowest
// ids is objective-neutral and deterministic.
IntMatrix canonical_assignment(const MiqpModel& model,
                               const std::vector<std::vector<int>>& counts) {
  IntMatrix A = IntMatrix::Zero(model.M, model.N);
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::size_t next = 0;
    const auto& members = model.classes[c];
    for (int m = 0; m < model.M; ++m) {
      for (int k = 0; k < counts[c][m] && next < members.size(); ++k) {
        A(m, members[next++]) = 1;
      }
    }
  }
  return A;
}

bool pick_task_configs(const AllocationProblem& problem, const IntMatrix& A,
                       std::vector<IntVector>& iota, IntVector& phi) {
  const int M = problem.num_tasks();
  iota.assign(M, IntVector());
  phi = IntVector::Zero(M);
  for (int m = 0; m < M; ++m) {
    Vector c = aggregate_capabilities(A.row(m).transpose(), problem.mapping,
                                      problem.capabilities);
    Vector c_hat =
        effective_capabilities(c, problem.degradation.row(m).transpose());
    const Matrix& req = problem.requirements[m];
    bool found = false;
    double best_cost = kInfinity;
    int best_k = 0, best_phi = 0;
    for (int k = 0; k < req.rows(); ++k) {
      Vector delta = c_hat - req.row(k).transpose();
      double min_margin = delta.minCoeff();
      for (int ph = 0; ph <= 1; ++ph) {
        if (min_margin < -ph * problem.delta_max - 1e-12) continue;
        double s = delta.sum();
        double cost =
            problem.task_priorities(m) * ph + problem.margin_weight * s * s;
        if (!found || cost < best_cost - 1e-15) {
          found = true;
          best_cost = cost;
          best_k = k;
          best_phi = ph;
        }
        break;
      }
    }
    if (!found) return false;
    iota[m] = IntVector::Zero(req.rows());
    iota[m](best_k) = 1;
    phi(m) = best_phi;
  }
  return true;
}

AllocationSolution assemble(const AllocationProblem& problem,
                            const IntMatrix& A,
                            const std::vector<IntVector>& iota,
                            const IntVector& phi) {
  AllocationSolution sol;
  sol.feasible = true;
  sol.A = A;
  sol.iota = iota;
  sol.phi = phi;
  sol.D = margins(A, iota, problem);
  sol.objective = exact_objective(A, iota, phi, problem);
  return sol;
}

// Rounds fractional counts to a feasible assignment: nearest integers, then
// deterministic repairs against class sizes and species availability, then
// the exact per-task configuration pick.
std::optional<AllocationSolution> round_counts(const CountModel& cm,
                                               const Vector& x_full) {
  const MiqpModel& model = *cm.binary;
  const AllocationProblem& problem = model.problem;
  const int M = cm.M;
  const int C = cm.C;

  std::vector<std::vector<double>> sums(C, std::vector<double>(M, 0.0));
  std::vector<std::vector<int>> counts(C, std::vector<int>(M, 0));
  for (int c = 0; c < C; ++c) {
    for (int m = 0; m < M; ++m) {
      sums[c][m] = x_full(cm.count_index(c, m));
      counts[c][m] = static_cast<int>(std::llround(sums[c][m]));
    }
  }

  auto weakest_cell = [&](auto&& in_scope) {
    int bc = -1, bm = -1;
    double best = kInfinity;
    for (int c = 0; c < C; ++c) {
      for (int m = 0; m < M; ++m) {
        if (counts[c][m] <= 0 || !in_scope(c)) continue;
        if (sums[c][m] < best) {
          best = sums[c][m];
          bc = c;
          bm = m;
        }
      }
    }
    return std::make_pair(bc, bm);
  };

  for (int c = 0; c < C; ++c) {
    if (!cm.class_eligible[c]) {
      for (int m = 0; m < M; ++m) counts[c][m] = 0;
      continue;
    }
    int total = 0;
    for (int m = 0; m < M; ++m) total += counts[c][m];
    while (total > cm.class_size[c]) {
      auto [bc, bm] = weakest_cell([&](int cc) { return cc == c; });
      if (bc < 0) break;
      counts[bc][bm] -= 1;
      sums[bc][bm] = kInfinity;
      total -= 1;
    }
  }
  for (int s = 0; s < problem.num_species(); ++s) {
    int total = 0;
    for (int c = 0; c < C; ++c) {
      if (cm.class_species[c] != s) continue;
      for (int m = 0; m < M; ++m) total += counts[c][m];
    }
    while (total > problem.mapping.lambda(s)) {
      auto [bc, bm] =
          weakest_cell([&](int cc) { return cm.class_species[cc] == s; });
      if (bc < 0) break;
      counts[bc][bm] -= 1;
      sums[bc][bm] = kInfinity;
      total -= 1;
    }
  }

  IntMatrix A = canonical_assignment(model, counts);
  std::vector<IntVector> iota;
  IntVector phi;
  if (!pick_task_configs(problem, A, iota, phi)) return std::nullopt;
  return assemble(problem, A, iota, phi);
}

struct BranchChoice {
  int var = -1;
  double value = 0.0;
  double frac = 0.0;
  bool is_count = false;
};

// Configuration and relaxation binaries branch before counts: a fractional
// phi buys constraint slack through its big-M coefficient and a fractional
// iota blends requirement rows, so count branching under an unpinned phi or
// iota grinds through a weak-bound plateau. Every unpinned tier-1 binary is
// therefore a candidate even when its relaxed value happens to be integral.
// Within a tier: most fractional, ties to the lowest variable index.
std::vector<BranchChoice> branch_candidates(const CountModel& cm,
                                            const Node& node,
                                            const Vector& x_full) {
  std::vector<BranchChoice> tier1, tier2;
  for (int v = cm.num_counts; v < cm.n_vars; ++v) {
    auto [lo, hi] = effective_bounds(cm, node, v);
    if (hi - lo < 0.5) continue;  // pinned
    double frac = std::abs(x_full(v) - std::round(x_full(v)));
    tier1.push_back({v, x_full(v), frac, false});
  }
  for (int v = 0; v < cm.num_counts; ++v) {
    double frac = std::abs(x_full(v) - std::round(x_full(v)));
    if (frac <= kIntegralityTol) continue;
    tier2.push_back({v, x_full(v), frac, true});
  }
  auto order = [](const BranchChoice& a, const BranchChoice& b) {
    if (std::abs(a.frac - b.frac) > 1e-12) return a.frac > b.frac;
    return a.var < b.var;
  };
  std::sort(tier1.begin(), tier1.end(), order);
  std::sort(tier2.begin(), tier2.end(), order);
  if (!tier1.empty()) return tier1;
  return tier2;
}

std::vector<Node> make_children(const CountModel& cm, const Node& node,
                                const BranchChoice& choice, double bound) {
  std::vector<Node> children;
  // Tier-1 binaries split into their pinned halves regardless of the
  // relaxed value; counts split at the fractional floor.
  double split = choice.is_count ? std::floor(choice.value) : 0.0;
  Node down = node;
  down.bound = bound;
  down.bounds.push_back({static_cast<double>(choice.var), -kInfinity, split});
  children.push_back(std::move(down));
  Node up = node;
  up.bound = bound;
  up.bounds.push_back({static_cast<double>(choice.var), split + 1.0,
                       kInfinity});
  children.push_back(std::move(up));
  // Selecting a configuration forces its siblings out.
  if (!choice.is_count) {
    for (int m = 0; m < cm.M; ++m) {
      int k_count =
          static_cast<int>(cm.binary->problem.requirements[m].rows());
      if (choice.var >= cm.iota_index(m, 0) &&
          choice.var < cm.iota_index(m, 0) + k_count) {
        for (int k = 0; k < k_count; ++k) {
          int sib = cm.iota_index(m, k);
          if (sib != choice.var) {
            children[1].bounds.push_back(
                {static_cast<double>(sib), -kInfinity, 0.0});
          }
        }
      }
    }
  }
  return children;
}

}  // namespace

std::string diagnose_infeasibility(const AllocationProblem& problem) {
  const int N = problem.num_robots();
  int eligible = 0;
  for (int i = 0; i < N; ++i) eligible += problem.eligibility(i);

  IntVector per_species = IntVector::Zero(problem.num_species());
  for (int i = 0; i < N; ++i) {
    if (problem.eligibility(i)) per_species(problem.mapping.species_of(i)) += 1;
  }
  for (int s = 0; s < problem.num_species(); ++s) {
    per_species(s) = std::min(per_species(s), problem.mapping.lambda(s));
  }
  for (int m = 0; m < problem.num_tasks(); ++m) {
    Vector c_max = Vector::Zero(problem.num_capabilities());
    for (int s = 0; s < problem.num_species(); ++s) {
      c_max += per_species(s) * problem.capabilities.Q.row(s).transpose();
    }
    Vector c_hat =
        effective_capabilities(c_max, problem.degradation.row(m).transpose());
    bool some_row_fits = false;
    for (int k = 0; k < problem.requirements[m].rows(); ++k) {
      Vector delta = c_hat - problem.requirements[m].row(k).transpose();
      if (delta.minCoeff() >= -problem.delta_max - 1e-12) some_row_fits = true;
    }
    if (!some_row_fits) {
      std::string reason =
          "task " + std::to_string(m) +
          " cannot satisfy any configuration within delta_max even fully "
          "relaxed (capability margin constraints 16b/16c)";
      if (eligible < N) {
        reason += "; " + std::to_string(N - eligible) +
                  " robot(s) excluded by the discrepancy threshold (16e)";
      }
      return reason;
    }
  }
  return "conflicting task requirements under species availability (16c/16d)";
}

double root_relaxation_objective(const MiqpModel& model) {
  CountModel cm = build_count_model(model);
  Node root;
  NodeQp nq = build_node_qp(cm, root);
  if (nq.infeasible) return kInfinity;
  QpResult res = solve_qp(nq.qp);
  return res.objective + nq.obj_const;
}

AllocationSolution solve(const MiqpModel& model, const SolveSettings& settings) {
  auto t0 = std::chrono::steady_clock::now();
  const AllocationProblem& problem = model.problem;
  CountModel cm = build_count_model(model);

  std::optional<AllocationSolution> best;
  double best_obj = kInfinity;
  auto offer = [&](const std::optional<AllocationSolution>& cand) {
    if (!cand || !cand->feasible) return;
    double tie = 1e-12 * (1.0 + std::abs(best_obj));
    if (!best || cand->objective < best_obj - tie) {
      best = cand;
      best_obj = cand->objective;
    } else if (cand->objective <= best_obj + tie && lex_less(*cand, *best)) {
      best = cand;
      best_obj = cand->objective;
    }
  };

  // Warm incumbents: the repaired previous allocation and the empty one.
  {
    Vector x_prev = Vector::Zero(cm.n_vars);
    for (int c = 0; c < cm.C; ++c) {
      if (cm.class_prev[c] >= 0 && cm.class_eligible[c]) {
        x_prev(cm.count_index(c, cm.class_prev[c])) =
            static_cast<double>(cm.class_size[c]);
      }
    }
    offer(round_counts(cm, x_prev));
    offer(round_counts(cm, Vector::Zero(cm.n_vars)));
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  Node root;
  root.id = 0;
  open.push(root);
  long next_id = 1;
  long nodes_explored = 0;
  double global_lb = -kInfinity;
  double gap = kInfinity;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    global_lb = node.bound;

    double prune_eps = 1e-11 * (1.0 + std::abs(best_obj));
    if (best && node.bound >= best_obj - prune_eps) {
      gap = 0.0;
      break;
    }
    if (best) {
      double current_gap = best_obj - std::min(node.bound, best_obj);
      if (current_gap <= settings.gap_tol * (1.0 + std::abs(best_obj))) {
        gap = current_gap;
        break;
      }
    }
    if (nodes_explored >= settings.node_limit) {
      gap = best ? best_obj - std::min(node.bound, best_obj) : kInfinity;
      break;
    }
    ++nodes_explored;

    NodeQp nq = build_node_qp(cm, node);
    if (nq.infeasible) continue;
    QpResult res = solve_qp(nq.qp);

    double node_lb;
    bool trusted = res.status == QpStatus::optimal;
    Vector x_full = full_solution(cm, nq, res.x);
    if (trusted) {
      double obj = res.objective + nq.obj_const;
      node_lb = obj - 1e-9 * (1.0 + std::abs(obj));
      double with_secants = secant_bound(cm, node, x_full);
      node_lb = std::max(node_lb, with_secants);
      if (node_lb == kInfinity) continue;
    } else {
      if (min_constraint_violation(nq.qp) > 1e-7) continue;
      node_lb = node.bound;  // feasible but unconverged: keep the old bound
    }
    node_lb = std::max(node_lb, node.bound) + settings.corrupt_bound;
    if (best && node_lb >= best_obj - prune_eps) continue;

    std::vector<BranchChoice> candidates = branch_candidates(cm, node, x_full);

    if (candidates.empty()) {
      // Integral up to class symmetry: extract the canonical solution. The
      // node is fathomed when the bound is trusted; otherwise fall back to
      // branching on the first free variable.
      std::vector<std::vector<int>> counts(cm.C, std::vector<int>(cm.M, 0));
      for (int c = 0; c < cm.C; ++c) {
        for (int m = 0; m < cm.M; ++m) {
          counts[c][m] =
              static_cast<int>(std::llround(x_full(cm.count_index(c, m))));
        }
      }
      IntMatrix A = canonical_assignment(model, counts);
      std::vector<IntVector> iota(cm.M);
      IntVector phi(cm.M);
      for (int m = 0; m < cm.M; ++m) {
        const int K = static_cast<int>(problem.requirements[m].rows());
        iota[m] = IntVector::Zero(K);
        for (int k = 0; k < K; ++k) {
          iota[m](k) = x_full(cm.iota_index(m, k)) > 0.5 ? 1 : 0;
        }
        phi(m) = x_full(cm.phi_index(m)) > 0.5 ? 1 : 0;
      }
      AllocationSolution cand = assemble(problem, A, iota, phi);
      if (check_solution(problem, cand).empty()) offer(cand);
      offer(round_counts(cm, x_full));
      if (!trusted) {
        for (int v = 0; v < cm.n_vars; ++v) {
          // Unconverged relaxation: split the box of the first variable that
          // still has room, to preserve exhaustiveness.
          NodeQp probe = nq;
          (void)probe;
          double lo = cm.lb(v), hi = cm.ub(v);
          for (const auto& b : node.bounds) {
            if (static_cast<int>(b[0]) == v) {
              lo = std::max(lo, b[1]);
              hi = std::min(hi, b[2]);
            }
          }
          if (hi - lo > 0.5) {
            BranchChoice forced{v, 0.5 * (lo + hi), 0.5, v < cm.num_counts};
            for (Node& child : make_children(cm, node, forced, node_lb)) {
              child.id = next_id++;
              open.push(std::move(child));
            }
            break;
          }
        }
      }
      continue;
    }

    offer(round_counts(cm, x_full));

    for (Node& child :
         make_children(cm, node, candidates.front(), node_lb)) {
      child.id = next_id++;
      open.push(std::move(child));
    }
  }

  if (open.empty() && gap == kInfinity) gap = 0.0;

  auto wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  if (!best) {
    AllocationSolution out;
    out.feasible = false;
    out.infeasibility = nodes_explored >= settings.node_limit
                            ? "node limit reached without an incumbent"
                            : diagnose_infeasibility(problem);
    out.stats = {nodes_explored, wall_ms, kInfinity};
    return out;
  }
  AllocationSolution out = *best;
  out.stats.nodes = nodes_explored;
  out.stats.wall_ms = wall_ms;
  out.stats.gap = std::max(0.0, std::min(gap, best_obj - global_lb));
  if (open.empty()) out.stats.gap = 0.0;
  return out;
}

AllocationSolution solve(const MiqpModel& model, double gap_tol,
                         long node_limit) {
  SolveSettings settings;
  settings.gap_tol = gap_tol;
  settings.node_limit = node_limit;
  return solve(model, settings);
}

}  // namespace rta
