#include "rta/allocator/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rta {

namespace {

double eval_objective(const QpProblem& qp, const Vector& x) {
  return 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
}

double violation(const QpProblem& qp, const Vector& x) {
  double v = 0.0;
  for (const auto& row : qp.ineq) v = std::max(v, row.rhs - row.dot(x));
  for (const auto& row : qp.eq) v = std::max(v, std::abs(row.dot(x) - row.rhs));
  for (int j = 0; j < qp.n; ++j) {
    v = std::max(v, qp.lb(j) - x(j));
    v = std::max(v, x(j) - qp.ub(j));
  }
  return v;
}

// Step fraction keeping all entries of v + alpha*dv strictly positive.
double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (int i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

}  // namespace

QpResult solve_qp(const QpProblem& qp, const QpSettings& settings) {
  const int n = qp.n;
  const int mi = static_cast<int>(qp.ineq.size());
  const int me = static_cast<int>(qp.eq.size());
  QpResult res;

  if (n == 0) {
    res.status = QpStatus::optimal;
    res.x = Vector();
    res.objective = 0.0;
    // A degenerate variable-free system can still be inconsistent.
    for (const auto& row : qp.ineq) {
      if (row.rhs > 1e-9) res.status = QpStatus::infeasible;
    }
    for (const auto& row : qp.eq) {
      if (std::abs(row.rhs) > 1e-9) res.status = QpStatus::infeasible;
    }
    return res;
  }

  for (int j = 0; j < n; ++j) {
    if (!(qp.lb(j) < qp.ub(j))) {
      throw std::invalid_argument("solve_qp: boxes must satisfy lb < ub");
    }
  }

  // Primal start at the box midpoint; slacks pushed strictly positive.
  Vector x = 0.5 * (qp.lb + qp.ub);
  Vector s_g(mi), z_g = Vector::Ones(mi);
  for (int r = 0; r < mi; ++r) {
    s_g(r) = std::max(qp.ineq[r].dot(x) - qp.ineq[r].rhs, 1.0);
  }
  Vector s_lo = x - qp.lb, s_hi = qp.ub - x;
  Vector z_lo = Vector::Ones(n), z_hi = Vector::Ones(n);
  Vector y = Vector::Zero(me);

  const int total_pairs = mi + 2 * n;
  Matrix K(n, n);
  Eigen::LDLT<Matrix> K_fact;
  Matrix E_dense;
  if (me > 0) {
    E_dense = Matrix::Zero(me, n);
    for (int r = 0; r < me; ++r) {
      for (const auto& [j, v] : qp.eq[r].coeffs) E_dense(r, j) = v;
    }
  }

  double mu = 1.0;
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    // Residuals.
    Vector r_dual = qp.H * x + qp.g - z_lo + z_hi;
    for (int r = 0; r < mi; ++r) {
      for (const auto& [j, v] : qp.ineq[r].coeffs) r_dual(j) -= v * z_g(r);
    }
    if (me > 0) r_dual -= E_dense.transpose() * y;

    Vector r_pri(mi);
    for (int r = 0; r < mi; ++r) {
      r_pri(r) = qp.ineq[r].dot(x) - s_g(r) - qp.ineq[r].rhs;
    }
    Vector r_eq(me);
    for (int r = 0; r < me; ++r) r_eq(r) = qp.eq[r].dot(x) - qp.eq[r].rhs;
    Vector r_lo = x - s_lo - qp.lb;
    Vector r_hi = qp.ub - s_hi - x;

    mu = (s_g.dot(z_g) + s_lo.dot(z_lo) + s_hi.dot(z_hi)) / total_pairs;

    double feas = std::max({r_pri.size() ? r_pri.cwiseAbs().maxCoeff() : 0.0,
                            r_eq.size() ? r_eq.cwiseAbs().maxCoeff() : 0.0,
                            r_lo.cwiseAbs().maxCoeff(),
                            r_hi.cwiseAbs().maxCoeff()});
    double dual_feas = r_dual.cwiseAbs().maxCoeff();
    double scale = 1.0 + std::max(x.cwiseAbs().maxCoeff(),
                                  qp.g.size() ? qp.g.cwiseAbs().maxCoeff() : 0.0);
    if (feas <= settings.tolerance * scale &&
        dual_feas <= settings.tolerance * scale * 10.0 &&
        mu <= settings.tolerance * scale) {
      res.status = QpStatus::optimal;
      res.x = x;
      res.objective = eval_objective(qp, x);
      res.iterations = iter;
      res.complementarity = mu;
      res.primal_infeasibility = violation(qp, x);
      return res;
    }

    // Normal-equations matrix K = H + C'WC + diag(w_lo + w_hi).
    Vector w_g = z_g.cwiseQuotient(s_g);
    Vector w_lo = z_lo.cwiseQuotient(s_lo);
    Vector w_hi = z_hi.cwiseQuotient(s_hi);
    K = qp.H;
    K.diagonal() += w_lo + w_hi;
    for (int r = 0; r < mi; ++r) {
      const auto& c = qp.ineq[r].coeffs;
      for (std::size_t a = 0; a < c.size(); ++a) {
        for (std::size_t b = 0; b < c.size(); ++b) {
          K(c[a].first, c[b].first) += w_g(r) * c[a].second * c[b].second;
        }
      }
    }
    K_fact.compute(K);
    if (K_fact.info() != Eigen::Success) {
      K.diagonal().array() += 1e-10;
      K_fact.compute(K);
    }

    Matrix KinvEt;
    Eigen::LDLT<Matrix> schur_fact;
    if (me > 0) {
      KinvEt = K_fact.solve(E_dense.transpose());
      Matrix schur = E_dense * KinvEt;
      schur_fact.compute(schur);
    }

    // One Newton solve for a given complementarity right-hand side.
    auto newton = [&](const Vector& rc_g, const Vector& rc_lo,
                      const Vector& rc_hi, Vector& dx, Vector& ds_g,
                      Vector& dz_g, Vector& ds_lo, Vector& dz_lo,
                      Vector& ds_hi, Vector& dz_hi, Vector& dy) {
      Vector rhs = -r_dual;
      for (int r = 0; r < mi; ++r) {
        double term = (rc_g(r) + z_g(r) * r_pri(r)) / s_g(r);
        for (const auto& [j, v] : qp.ineq[r].coeffs) rhs(j) -= v * term;
      }
      rhs -= (rc_lo + z_lo.cwiseProduct(r_lo)).cwiseQuotient(s_lo);
      rhs += (rc_hi + z_hi.cwiseProduct(r_hi)).cwiseQuotient(s_hi);

      if (me > 0) {
        Vector tmp = K_fact.solve(rhs);
        dy = schur_fact.solve(E_dense * tmp + r_eq);
        dx = tmp - KinvEt * dy;
        dy = -dy;
      } else {
        dx = K_fact.solve(rhs);
      }
      ds_g.resize(mi);
      dz_g.resize(mi);
      for (int r = 0; r < mi; ++r) {
        ds_g(r) = qp.ineq[r].dot(dx) + r_pri(r);
        dz_g(r) = -(rc_g(r) + z_g(r) * ds_g(r)) / s_g(r);
      }
      ds_lo = dx + r_lo;
      dz_lo = -(rc_lo + z_lo.cwiseProduct(ds_lo)).cwiseQuotient(s_lo);
      ds_hi = -dx + r_hi;
      dz_hi = -(rc_hi + z_hi.cwiseProduct(ds_hi)).cwiseQuotient(s_hi);
    };

    Vector dx, ds_g, dz_g, ds_lo, dz_lo, ds_hi, dz_hi, dy;

    // Predictor (affine scaling direction).
    newton(s_g.cwiseProduct(z_g), s_lo.cwiseProduct(z_lo),
           s_hi.cwiseProduct(z_hi), dx, ds_g, dz_g, ds_lo, dz_lo, ds_hi,
           dz_hi, dy);
    double ap = std::min({max_step(s_g, ds_g), max_step(s_lo, ds_lo),
                          max_step(s_hi, ds_hi)});
    double ad = std::min({max_step(z_g, dz_g), max_step(z_lo, dz_lo),
                          max_step(z_hi, dz_hi)});
    double mu_aff = ((s_g + ap * ds_g).dot(z_g + ad * dz_g) +
                     (s_lo + ap * ds_lo).dot(z_lo + ad * dz_lo) +
                     (s_hi + ap * ds_hi).dot(z_hi + ad * dz_hi)) /
                    total_pairs;
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0 - 1e-8);

    // Corrector with centering.
    Vector rc_g =
        s_g.cwiseProduct(z_g) + ds_g.cwiseProduct(dz_g) -
        Vector::Constant(mi, sigma * mu);
    Vector rc_lo = s_lo.cwiseProduct(z_lo) + ds_lo.cwiseProduct(dz_lo) -
                   Vector::Constant(n, sigma * mu);
    Vector rc_hi = s_hi.cwiseProduct(z_hi) + ds_hi.cwiseProduct(dz_hi) -
                   Vector::Constant(n, sigma * mu);
    newton(rc_g, rc_lo, rc_hi, dx, ds_g, dz_g, ds_lo, dz_lo, ds_hi, dz_hi,
           dy);

    double alpha_p = 0.995 * std::min({max_step(s_g, ds_g),
                                       max_step(s_lo, ds_lo),
                                       max_step(s_hi, ds_hi)});
    double alpha_d = 0.995 * std::min({max_step(z_g, dz_g),
                                       max_step(z_lo, dz_lo),
                                       max_step(z_hi, dz_hi)});
    alpha_p = std::min(alpha_p, 1.0);
    alpha_d = std::min(alpha_d, 1.0);

    x += alpha_p * dx;
    s_g += alpha_p * ds_g;
    s_lo += alpha_p * ds_lo;
    s_hi += alpha_p * ds_hi;
    z_g += alpha_d * dz_g;
    z_lo += alpha_d * dz_lo;
    z_hi += alpha_d * dz_hi;
    if (me > 0) y += alpha_d * dy;
    res.iterations = iter + 1;
  }

  res.status = QpStatus::max_iterations;
  res.x = x;
  res.objective = eval_objective(qp, x);
  res.complementarity = mu;
  res.primal_infeasibility = violation(qp, x);
  return res;
}

double min_constraint_violation(const QpProblem& qp) {
  // Phase-1: minimize 0.5|v|^2 + 0.5 eps |x|^2 over Cx + v >= d, Ex + v = f
  // (one v per row), boxes unchanged. The optimal x gives the least
  // achievable violation.
  const int n = qp.n;
  const int mi = static_cast<int>(qp.ineq.size());
  const int me = static_cast<int>(qp.eq.size());
  QpProblem ph;
  ph.n = n + mi + me;
  ph.H = Matrix::Zero(ph.n, ph.n);
  for (int j = 0; j < n; ++j) ph.H(j, j) = 1e-8;
  for (int j = n; j < ph.n; ++j) ph.H(j, j) = 1.0;
  ph.g = Vector::Zero(ph.n);
  ph.lb = Vector::Constant(ph.n, -1e6);
  ph.ub = Vector::Constant(ph.n, 1e6);
  ph.lb.head(n) = qp.lb;
  ph.ub.head(n) = qp.ub;
  for (int r = 0; r < mi; ++r) {
    SparseRow row = qp.ineq[r];
    row.coeffs.emplace_back(n + r, 1.0);
    ph.ineq.push_back(std::move(row));
  }
  for (int r = 0; r < me; ++r) {
    SparseRow row = qp.eq[r];
    row.coeffs.emplace_back(n + mi + r, 1.0);
    ph.eq.push_back(std::move(row));
  }
  QpResult sol = solve_qp(ph, {1e-9, 150});
  if (sol.x.size() == 0) return 0.0;
  Vector x = sol.x.head(n);
  double v = 0.0;
  for (const auto& row : qp.ineq) v = std::max(v, row.rhs - row.dot(x));
  for (const auto& row : qp.eq) v = std::max(v, std::abs(row.dot(x) - row.rhs));
  return v;
}

}  // namespace rta
