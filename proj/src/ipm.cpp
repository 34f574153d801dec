// SPDX-License-Identifier: MIT
#include "ccmpc/ipm.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace ccmpc {

namespace {

struct RowEval {
  Vec c;                      // m constraint values
  std::vector<PsiDerivs> pd;  // nc tightening derivatives
  double min_d2 = 0;
};

bool delta_in_domain(const Vec& delta) {
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    if (!(delta[i] > 0.0) || !(delta[i] < 1.0)) return false;
  }
  return true;
}

RowEval eval_rows(const IpmProblem& P, const Vec& z, const Vec& delta) {
  const int nc = P.nc(), nd = P.nd(), nn = P.nn();
  RowEval e;
  e.pd.resize(nc);
  e.c.resize(P.m());
  e.min_d2 = kInf;
  const Vec az = nc > 0 ? Vec(P.Ac * z) : Vec();
  for (int i = 0; i < nc; ++i) {
    e.pd[i] = psi_derivatives(P.dists[i], delta[i]);
    e.c[i] = e.pd[i].value - az[i] - P.bc[i];
    e.min_d2 = std::min(e.min_d2, e.pd[i].d2);
  }
  const Vec dz = nd > 0 ? Vec(P.Ad * z) : Vec();
  for (int i = 0; i < nd; ++i) e.c[nc + i] = P.xd[i] - dz[i] - P.bd[i];
  for (int i = 0; i < nn; ++i) e.c[nc + nd + i] = -z[P.nonneg[i]];
  for (int i = 0; i < nc; ++i) e.c[nc + nd + nn + i] = P.eps_floor - delta[i];
  if (nc == 0) e.min_d2 = 0;
  return e;
}

Vec objective_grad_z(const IpmProblem& P, const Vec& z) { return P.H * z + P.g; }

Vec objective_grad_delta(const IpmProblem& P, const Vec& delta) {
  Vec gd(P.nc());
  for (int i = 0; i < P.nc(); ++i) gd[i] = -P.w_delta / (delta[i] * delta[i]);
  if (P.delta_reg > 0) gd += P.delta_reg * (delta - P.delta_ref);
  return gd;
}

/// Stacked residual [r_dual_z; r_dual_delta; r_cent; r_eq] of the modified
/// KKT map at parameter t.
Vec kkt_residual_vec(const IpmProblem& P, const Vec& z, const Vec& delta, const Vec& s,
                     double nu, double t, const RowEval& e) {
  const int nz = P.nz, nc = P.nc(), nd = P.nd(), nn = P.nn();
  const int m = P.m();
  Vec r(nz + nc + m + (nc > 0 ? 1 : 0));
  Vec rz = objective_grad_z(P, z);
  if (nc > 0) rz.noalias() -= P.Ac.transpose() * s.head(nc);
  if (nd > 0) rz.noalias() -= P.Ad.transpose() * s.segment(nc, nd);
  for (int i = 0; i < nn; ++i) rz[P.nonneg[i]] -= s[nc + nd + i];
  r.head(nz) = rz;
  if (nc > 0) {
    Vec rd = objective_grad_delta(P, delta);
    for (int i = 0; i < nc; ++i) rd[i] += s[i] * e.pd[i].d1 - s[nc + nd + nn + i] + nu;
    r.segment(nz, nc) = rd;
  }
  for (int j = 0; j < m; ++j) r[nz + nc + j] = -s[j] * e.c[j] - 1.0 / t;
  if (nc > 0) r[nz + nc + m] = delta.sum() - P.delta_bar;
  return r;
}

}  // namespace

Vec ipm_constraints(const IpmProblem& P, const Vec& z, const Vec& delta) {
  return eval_rows(P, z, delta).c;
}

IpmResult ipm_solve(const IpmProblem& P, const SolverConfig& cfg, const Vec& z0,
                    const Vec& delta0,
                    const std::function<bool(const Vec&, const Vec&)>& early_accept) {
  const int nz = P.nz, nc = P.nc(), nd = P.nd(), nn = P.nn();
  const int m = P.m();
  const int n = nz + nc;
  require(static_cast<int>(z0.size()) == nz && static_cast<int>(delta0.size()) == nc,
          "ipm_solve: start point has wrong dimensions");

  IpmResult res;
  res.z = z0;
  res.delta = delta0;

  if (m == 0) {
    Eigen::LLT<Mat> llt(P.H);
    require(llt.info() == Eigen::Success, "ipm_solve: objective Hessian not positive definite");
    res.z = llt.solve(-P.g);
    res.status = SolveStatus::optimal;
    return res;
  }

  require(delta_in_domain(res.delta) || nc == 0, "ipm_solve: start risk out of (0,1)");
  RowEval ev = eval_rows(P, res.z, res.delta);
  require((ev.c.array() < 0).all(), "ipm_solve: start point not strictly feasible");

  Vec s(m);
  for (int j = 0; j < m; ++j) {
    s[j] = std::min(1e10, std::max(1e-10, cfg.mu0 / (-ev.c[j])));
  }
  double nu = 0.0;
  const double kappa = 1.0 / cfg.mu_shrink;
  Vec aeq = Vec::Zero(n);
  aeq.tail(nc).setOnes();

  double t = 1.0;
  for (int iter = 0; iter < cfg.max_newton; ++iter) {
    res.iters = iter;
    if (ev.min_d2 < -1e-12) res.convexity_monitor_ok = false;

    const double eta = -ev.c.dot(s);
    const double r_eq = nc > 0 ? res.delta.sum() - P.delta_bar : 0.0;
    t = kappa * m / std::max(eta, 1e-300);
    Vec rt = kkt_residual_vec(P, res.z, res.delta, s, nu, t, ev);
    const double rd_inf = rt.head(nz + nc).lpNorm<Eigen::Infinity>();
    res.gap = eta;
    res.kkt_residual = std::max({rd_inf, std::abs(r_eq), eta});
    if (rd_inf <= cfg.tol_kkt && eta <= cfg.tol_gap && std::abs(r_eq) <= 1e-12) {
      res.status = SolveStatus::optimal;
      break;
    }

    // Reduced Newton system M dx = rhs with multipliers eliminated.
    Mat M = Mat::Zero(n, n);
    M.topLeftCorner(nz, nz) = P.H;
    Vec rhs(n);
    rhs.head(nz) = -objective_grad_z(P, res.z);
    if (nc > 0) {
      rhs.tail(nc) = -objective_grad_delta(P, res.delta);
      rhs.tail(nc).array() -= nu;
      for (int i = 0; i < nc; ++i) {
        M(nz + i, nz + i) += 2.0 * P.w_delta / std::pow(res.delta[i], 3) + P.delta_reg +
                             s[i] * ev.pd[i].d2;
      }
    }
    for (int i = 0; i < nc; ++i) {
      const double di = s[i] / (-ev.c[i]);
      const double wi = 1.0 / (t * ev.c[i]);
      const double d1 = ev.pd[i].d1;
      M.topLeftCorner(nz, nz).noalias() += di * P.Ac.row(i).transpose() * P.Ac.row(i);
      M.block(0, nz + i, nz, 1).noalias() -= di * d1 * P.Ac.row(i).transpose();
      M.block(nz + i, 0, 1, nz).noalias() -= di * d1 * P.Ac.row(i);
      M(nz + i, nz + i) += di * d1 * d1;
      rhs.head(nz) -= wi * P.Ac.row(i).transpose();
      rhs[nz + i] += wi * d1;
    }
    for (int i = 0; i < nd; ++i) {
      const double di = s[nc + i] / (-ev.c[nc + i]);
      const double wi = 1.0 / (t * ev.c[nc + i]);
      M.topLeftCorner(nz, nz).noalias() += di * P.Ad.row(i).transpose() * P.Ad.row(i);
      rhs.head(nz) -= wi * P.Ad.row(i).transpose();
    }
    for (int i = 0; i < nn; ++i) {
      const int j = nc + nd + i;
      M(P.nonneg[i], P.nonneg[i]) += s[j] / (-ev.c[j]);
      rhs[P.nonneg[i]] -= 1.0 / (t * ev.c[j]);
    }
    for (int i = 0; i < nc; ++i) {
      const int j = nc + nd + nn + i;
      M(nz + i, nz + i) += s[j] / (-ev.c[j]);
      rhs[nz + i] -= 1.0 / (t * ev.c[j]);
    }

    const double diag_scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    Eigen::LLT<Mat> llt;
    Vec w1, w2;
    bool factored = false;
    for (int attempt = 0; attempt < 14; ++attempt) {
      Mat Mr = M;
      if (reg > 0) Mr.diagonal().array() += reg * diag_scale;
      llt.compute(Mr);
      if (llt.info() == Eigen::Success) {
        w1 = llt.solve(rhs);
        if (nc > 0) w2 = llt.solve(aeq);
        if (w1.allFinite() && (nc == 0 || w2.allFinite())) {
          factored = true;
          break;
        }
      }
      reg = (reg == 0.0) ? 1e-14 : reg * 100.0;
    }
    if (!factored) break;
    if (reg > 1e-10) res.convexity_monitor_ok = false;

    double dnu = 0.0;
    Vec dx;
    if (nc > 0) {
      dnu = (w1.tail(nc).sum() + r_eq) / w2.tail(nc).sum();
      dx = w1 - dnu * w2;
    } else {
      dx = w1;
    }

    Vec gvec(m);
    const Vec ac_dz = nc > 0 ? Vec(P.Ac * dx.head(nz)) : Vec();
    const Vec ad_dz = nd > 0 ? Vec(P.Ad * dx.head(nz)) : Vec();
    for (int i = 0; i < nc; ++i) gvec[i] = -ac_dz[i] + ev.pd[i].d1 * dx[nz + i];
    for (int i = 0; i < nd; ++i) gvec[nc + i] = -ad_dz[i];
    for (int i = 0; i < nn; ++i) gvec[nc + nd + i] = -dx[P.nonneg[i]];
    for (int i = 0; i < nc; ++i) gvec[nc + nd + nn + i] = -dx[nz + i];
    Vec ds(m);
    for (int j = 0; j < m; ++j) {
      ds[j] = -1.0 / (t * ev.c[j]) - s[j] - (s[j] / ev.c[j]) * gvec[j];
    }

    double alpha = 1.0;
    for (int j = 0; j < m; ++j) {
      if (ds[j] < 0) alpha = std::min(alpha, -s[j] / ds[j]);
    }
    alpha = std::min(1.0, 0.99 * alpha);

    // Stage 1: restore strict primal feasibility (feasible set is convex, so
    // feasibility is preserved under further shrinking).
    Vec z_t, delta_t;
    RowEval ev_t;
    bool feasible = false;
    while (alpha >= 1e-16) {
      z_t = res.z + alpha * dx.head(nz);
      delta_t = res.delta + alpha * dx.tail(nc);
      if (nc == 0 || delta_in_domain(delta_t)) {
        ev_t = eval_rows(P, z_t, delta_t);
        if ((ev_t.c.array() < 0).all()) {
          feasible = true;
          break;
        }
      }
      alpha *= cfg.ls_beta;
    }
    if (!feasible) break;

    // Stage 2: sufficient decrease of the modified KKT residual.
    const double r0 = rt.norm();
    bool improved = false;
    while (alpha >= 1e-16) {
      const Vec s_t = s + alpha * ds;
      const double nu_t = nu + alpha * dnu;
      const double rn =
          kkt_residual_vec(P, z_t, delta_t, s_t, nu_t, t, ev_t).norm();
      if (rn <= (1.0 - cfg.ls_alpha * alpha) * r0) {
        improved = true;
        break;
      }
      alpha *= cfg.ls_beta;
      z_t = res.z + alpha * dx.head(nz);
      delta_t = res.delta + alpha * dx.tail(nc);
      ev_t = eval_rows(P, z_t, delta_t);
    }
    if (!improved) break;

    res.z = z_t;
    res.delta = delta_t;
    s += alpha * ds;
    nu += alpha * dnu;
    ev = ev_t;
    res.iters = iter + 1;

    if (early_accept && early_accept(res.z, res.delta)) {
      res.status = SolveStatus::optimal;
      res.early_accepted = true;
      break;
    }
  }

  res.s_chance = s.head(nc);
  res.s_det = s.segment(nc, nd);
  res.s_nonneg = s.segment(nc + nd, nn);
  res.s_floor = s.tail(nc);
  res.nu = nu;
  if (res.status != SolveStatus::optimal) {
    const double eta = -ev.c.dot(s);
    const double r_eq = nc > 0 ? res.delta.sum() - P.delta_bar : 0.0;
    Vec rt = kkt_residual_vec(P, res.z, res.delta, s, nu, t, ev);
    res.gap = eta;
    res.kkt_residual =
        std::max({rt.head(nz + nc).lpNorm<Eigen::Infinity>(), std::abs(r_eq), eta});
  }
  return res;
}

}  // namespace ccmpc
