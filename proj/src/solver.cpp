// SPDX-License-Identifier: MIT
#include "ccmpc/solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace ccmpc {

namespace {

constexpr double kFeasMargin = 1e-9;    ///< strict-interior margin to skip phase 1
constexpr double kPhase1Accept = 1e-7;  ///< early-exit clearance of the relaxation
constexpr double kPhase1Reg = 1e-8;

IpmProblem to_ipm(const RiskProblem& P) {
  IpmProblem ip;
  ip.H = P.H;
  ip.g = P.g;
  ip.w_delta = P.w_delta;
  ip.nz = P.nz();
  const int nc = P.nc();
  const int nd = static_cast<int>(P.det.size());
  ip.dists.reserve(nc);
  ip.Ac.resize(nc, ip.nz);
  ip.bc.resize(nc);
  for (int i = 0; i < nc; ++i) {
    ip.dists.push_back(P.chance[i].dist);
    ip.Ac.row(i) = P.chance[i].a;
    ip.bc[i] = P.chance[i].b;
  }
  ip.Ad.resize(nd, ip.nz);
  ip.bd.resize(nd);
  ip.xd.resize(nd);
  for (int i = 0; i < nd; ++i) {
    ip.Ad.row(i) = P.det[i].a;
    ip.bd[i] = P.det[i].b;
    ip.xd[i] = P.det[i].x;
  }
  for (int gi = 0; gi < P.n_gamma(); ++gi) ip.nonneg.push_back(P.N * P.n_v + gi);
  ip.eps_floor = P.budget.epsilon_floor;
  ip.delta_bar = P.budget.delta_bar;
  return ip;
}

bool delta_domain_ok(const Vec& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0) || !(d[i] < 1.0)) return false;
  }
  return true;
}

bool strictly_feasible(const IpmProblem& ip, const Vec& z, const Vec& d) {
  if (ip.nc() > 0 && !delta_domain_ok(d)) return false;
  if (ip.m() == 0) return true;
  return ipm_constraints(ip, z, d).maxCoeff() < -kFeasMargin;
}

void start_point(const RiskProblem& P, const Solution* warm, Vec& z0, Vec& d0) {
  const int nv_total = P.N * P.n_v;
  z0 = Vec::Zero(P.nz());
  for (int gi = 0; gi < P.n_gamma(); ++gi) z0[nv_total + gi] = 1.0;
  d0 = P.nc() > 0 ? uniform_allocation(P.budget, P.nc()) : Vec();
  if (!warm) return;
  if (warm->v_hat.size() == nv_total) z0.head(nv_total) = warm->v_hat;
  if (warm->gamma_act.size() == P.n_gamma()) {
    for (int gi = 0; gi < P.n_gamma(); ++gi) {
      z0[nv_total + gi] = std::max(warm->gamma_act[gi], 1e-6);
    }
  }
  if (P.nc() > 0 && warm->delta.size() == P.nc()) {
    Vec d = warm->delta.cwiseMax(10 * P.budget.epsilon_floor).cwiseMin(0.999);
    d *= P.budget.delta_bar / d.sum();
    if ((d.array() > 2 * P.budget.epsilon_floor).all() && (d.array() < 1).all()) d0 = d;
  }
}

struct Phase1Outcome {
  bool feasible = false;
  Vec z, delta;
  double worst = 0;
  SolveStatus status = SolveStatus::optimal;
};

/// Elastic relaxation min s + tiny regularizers s.t. every chance/det row
/// cleared by s; slack positivity, risk floor and budget stay hard.
Phase1Outcome phase1(const IpmProblem& ip, const SolverConfig& cfg, const Vec& z0,
                     const Vec& d0) {
  const int nz = ip.nz;
  IpmProblem p1;
  p1.nz = nz + 1;
  p1.H = Mat::Identity(p1.nz, p1.nz) * kPhase1Reg;
  p1.g = Vec::Zero(p1.nz);
  p1.g[nz] = 1.0;
  p1.delta_reg = kPhase1Reg;
  p1.delta_ref = d0;
  p1.dists = ip.dists;
  p1.Ac.resize(ip.nc(), p1.nz);
  if (ip.nc() > 0) {
    p1.Ac.leftCols(nz) = ip.Ac;
    p1.Ac.col(nz).setOnes();
  }
  p1.bc = ip.bc;
  p1.Ad.resize(ip.nd(), p1.nz);
  if (ip.nd() > 0) {
    p1.Ad.leftCols(nz) = ip.Ad;
    p1.Ad.col(nz).setOnes();
  }
  p1.bd = ip.bd;
  p1.xd = ip.xd;
  p1.nonneg = ip.nonneg;
  p1.eps_floor = ip.eps_floor;
  p1.delta_bar = ip.delta_bar;

  double worst0 = 0;
  if (ip.nc() + ip.nd() > 0) {
    const Vec c0 = ipm_constraints(ip, z0, d0);
    worst0 = c0.head(ip.nc() + ip.nd()).maxCoeff();
  }
  Vec z1(nz + 1);
  z1.head(nz) = z0;
  z1[nz] = worst0 + 1.0;

  auto cleared = [&ip, nz](const Vec& z, const Vec& delta) {
    return ipm_constraints(ip, z.head(nz), delta).maxCoeff() < -kPhase1Accept;
  };
  IpmResult r = ipm_solve(p1, cfg, z1, d0, cleared);

  Phase1Outcome out;
  out.z = r.z.head(nz);
  out.delta = r.delta;
  out.worst = ipm_constraints(ip, out.z, out.delta).maxCoeff();
  out.feasible = out.worst < -kFeasMargin;
  out.status = r.status;
  return out;
}

void fill_primal(Solution& sol, const RiskProblem& P, const Vec& z, const Vec& delta) {
  const int nv_total = P.N * P.n_v;
  sol.v_hat = z.head(nv_total);
  sol.gamma_act = z.tail(P.n_gamma());
  sol.gamma_full = Vec::Zero(P.N * P.n_xi);
  const int soft_base = 2 * P.N * (P.n_xi + P.n_v);
  for (int gi = 0; gi < P.n_gamma(); ++gi) {
    sol.gamma_full[P.gamma_rows[gi] - soft_base] = sol.gamma_act[gi];
  }
  sol.delta = delta;
}

Solution to_solution(const RiskProblem& P, const IpmResult& r, bool used_phase1) {
  Solution sol;
  fill_primal(sol, P, r.z, r.delta);
  sol.mu_chance = r.s_chance;
  sol.mu_det = r.s_det;
  sol.mu_gamma = r.s_nonneg;
  sol.mu_floor = r.s_floor;
  sol.lambda = r.nu;
  sol.objective_excl_reg = 0.5 * r.z.dot(P.H * r.z) + P.g.dot(r.z);
  double reg = 0;
  for (int i = 0; i < P.nc(); ++i) reg += P.w_delta / r.delta[i];
  sol.objective = sol.objective_excl_reg + reg;
  sol.kkt_residual = r.kkt_residual;
  sol.gap = r.gap;
  sol.status = r.status;
  sol.newton_iters = r.iters;
  sol.used_phase1 = used_phase1;
  sol.convexity_monitor_ok = r.convexity_monitor_ok;
  return sol;
}

}  // namespace

Solution solve(const RiskProblem& P, const SolverConfig& cfg, const Solution* warm) {
  IpmProblem ip = to_ipm(P);
  Vec z0, d0;
  start_point(P, warm, z0, d0);
  bool ready = strictly_feasible(ip, z0, d0);
  if (!ready && warm) {
    start_point(P, nullptr, z0, d0);
    ready = strictly_feasible(ip, z0, d0);
  }
  bool used_phase1 = false;
  if (!ready) {
    used_phase1 = true;
    Phase1Outcome f = phase1(ip, cfg, z0, d0);
    if (!f.feasible) {
      Solution sol;
      fill_primal(sol, P, f.z, f.delta);
      sol.status = f.status == SolveStatus::max_iter ? SolveStatus::max_iter
                                                     : SolveStatus::infeasible;
      sol.infeasibility = std::max(0.0, f.worst);
      sol.used_phase1 = true;
      return sol;
    }
    z0 = f.z;
    d0 = f.delta;
  }
  IpmResult r = ipm_solve(ip, cfg, z0, d0);
  return to_solution(P, r, used_phase1);
}

Solution solve_deterministic(const RiskProblem& P, const SolverConfig& cfg) {
  require(P.chance.empty(), "solve_deterministic: problem still has chance rows");
  return solve(P, cfg);
}

Solution solve_fixed_risk(const RiskProblem& P, const Vec& delta_fixed,
                          const SolverConfig& cfg, const Solution* warm) {
  const int nc = P.nc();
  require(static_cast<int>(delta_fixed.size()) == nc,
          "solve_fixed_risk: allocation does not match the chance rows");
  for (int i = 0; i < nc; ++i) {
    require(delta_fixed[i] > 0 && delta_fixed[i] < 1,
            "solve_fixed_risk: risk levels must lie in (0,1)");
  }
  IpmProblem ip = to_ipm(P);
  IpmProblem qp;
  qp.H = ip.H;
  qp.g = ip.g;
  qp.nz = ip.nz;
  const int nd = ip.nd();
  qp.Ad.resize(nc + nd, ip.nz);
  qp.bd.resize(nc + nd);
  qp.xd.resize(nc + nd);
  for (int i = 0; i < nc; ++i) {
    qp.Ad.row(i) = ip.Ac.row(i);
    qp.bd[i] = ip.bc[i];
    qp.xd[i] = psi(P.chance[i].dist, delta_fixed[i]);
  }
  if (nd > 0) {
    qp.Ad.bottomRows(nd) = ip.Ad;
    qp.bd.tail(nd) = ip.bd;
    qp.xd.tail(nd) = ip.xd;
  }
  qp.nonneg = ip.nonneg;

  Vec z0, d0;
  start_point(P, warm, z0, d0);
  bool ready = strictly_feasible(qp, z0, Vec());
  if (!ready && warm) {
    start_point(P, nullptr, z0, d0);
    ready = strictly_feasible(qp, z0, Vec());
  }
  bool used_phase1 = false;
  if (!ready) {
    used_phase1 = true;
    Phase1Outcome f = phase1(qp, cfg, z0, Vec());
    if (!f.feasible) {
      Solution sol;
      fill_primal(sol, P, f.z, delta_fixed);
      sol.status = f.status == SolveStatus::max_iter ? SolveStatus::max_iter
                                                     : SolveStatus::infeasible;
      sol.infeasibility = std::max(0.0, f.worst);
      sol.used_phase1 = true;
      return sol;
    }
    z0 = f.z;
  }
  IpmResult r = ipm_solve(qp, cfg, z0, Vec());

  Solution sol;
  fill_primal(sol, P, r.z, delta_fixed);
  sol.mu_chance = r.s_det.head(nc);
  sol.mu_det = r.s_det.tail(nd);
  sol.mu_gamma = r.s_nonneg;
  sol.objective_excl_reg = 0.5 * r.z.dot(P.H * r.z) + P.g.dot(r.z);
  double reg = 0;
  for (int i = 0; i < nc; ++i) reg += P.w_delta / delta_fixed[i];
  sol.objective = sol.objective_excl_reg + reg;
  sol.kkt_residual = r.kkt_residual;
  sol.gap = r.gap;
  sol.status = r.status;
  sol.newton_iters = r.iters;
  sol.used_phase1 = used_phase1;
  sol.convexity_monitor_ok = r.convexity_monitor_ok;
  return sol;
}

KktReport kkt_report(const RiskProblem& P, const Solution& sol) {
  IpmProblem ip = to_ipm(P);
  const int nz = ip.nz, nc = ip.nc(), nd = ip.nd(), nn = ip.nn();
  const int m = ip.m();
  Vec z(nz);
  z.head(P.N * P.n_v) = sol.v_hat;
  z.tail(P.n_gamma()) = sol.gamma_act;
  const Vec c = ipm_constraints(ip, z, sol.delta);

  KktReport rep;
  Vec rz = ip.H * z + ip.g;
  if (nc > 0) rz.noalias() -= ip.Ac.transpose() * sol.mu_chance;
  if (nd > 0) rz.noalias() -= ip.Ad.transpose() * sol.mu_det;
  for (int i = 0; i < nn; ++i) rz[ip.nonneg[i]] -= sol.mu_gamma[i];
  rep.stationarity = nz > 0 ? rz.lpNorm<Eigen::Infinity>() : 0.0;

  std::vector<PsiDerivs> pd(nc);
  for (int i = 0; i < nc; ++i) {
    pd[i] = psi_derivatives(ip.dists[i], sol.delta[i]);
    const double rd = -ip.w_delta / (sol.delta[i] * sol.delta[i]) +
                      sol.mu_chance[i] * pd[i].d1 - sol.mu_floor[i] + sol.lambda;
    rep.stationarity = std::max(rep.stationarity, std::abs(rd));
  }

  Vec s(m);
  s.head(nc) = sol.mu_chance;
  s.segment(nc, nd) = sol.mu_det;
  s.segment(nc + nd, nn) = sol.mu_gamma;
  s.tail(nc) = sol.mu_floor;
  rep.complementarity = m > 0 ? (s.array() * c.array()).abs().maxCoeff() : 0.0;
  rep.primal = m > 0 ? std::max(0.0, c.maxCoeff()) : 0.0;
  rep.budget_gap = nc > 0 ? std::abs(sol.delta.sum() - P.budget.delta_bar) : 0.0;
  rep.lambda = sol.lambda;

  const double act_tol = 1e-6;
  std::vector<int> act;
  for (int j = 0; j < m; ++j) {
    if (c[j] > -act_tol) act.push_back(j);
  }
  const int n = nz + nc;
  const int rows = static_cast<int>(act.size()) + (nc > 0 ? 1 : 0);
  rep.n_active = rows;
  if (rows == 0) {
    rep.gram_cond = 1.0;
    return rep;
  }
  Mat G = Mat::Zero(rows, n);
  for (int r = 0; r < static_cast<int>(act.size()); ++r) {
    const int j = act[r];
    if (j < nc) {
      G.row(r).head(nz) = -ip.Ac.row(j);
      G(r, nz + j) = pd[j].d1;
    } else if (j < nc + nd) {
      G.row(r).head(nz) = -ip.Ad.row(j - nc);
    } else if (j < nc + nd + nn) {
      G(r, ip.nonneg[j - nc - nd]) = -1.0;
    } else {
      G(r, nz + (j - nc - nd - nn)) = -1.0;
    }
  }
  if (nc > 0) G.row(rows - 1).segment(nz, nc).setOnes();
  Eigen::JacobiSVD<Mat> svd(G);
  const Vec sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (rows > n || !(smin > 0) || !std::isfinite(smax / smin)) {
    rep.gram_cond = kInf;
    rep.licq_ok = false;
  } else {
    rep.gram_cond = (smax / smin) * (smax / smin);
    rep.licq_ok = rep.gram_cond <= 1e12;
  }
  return rep;
}

ProbeReport lipschitz_probe(const RiskProblem& P, const Solution& sol, const Vec& xi0,
                            const std::function<RiskProblem(const Vec&)>& rebuild,
                            const SolverConfig& cfg, double h) {
  ProbeReport pr;
  pr.base = kkt_report(P, sol);
  if (!pr.base.licq_ok) {
    pr.skipped = true;
    return pr;
  }
  for (Eigen::Index i = 0; i < xi0.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vec x = xi0;
      x[i] += sign * h;
      const RiskProblem P2 = rebuild(x);
      const Solution s2 = solve(P2, cfg, &sol);
      if (s2.status != SolveStatus::optimal) {
        pr.status_stable = false;
        continue;
      }
      double num = (s2.v_hat - sol.v_hat).squaredNorm();
      if (s2.gamma_act.size() == sol.gamma_act.size()) {
        num += (s2.gamma_act - sol.gamma_act).squaredNorm();
      }
      if (s2.delta.size() == sol.delta.size()) {
        num += (s2.delta - sol.delta).squaredNorm();
      }
      pr.ratio = std::max(pr.ratio, std::sqrt(num) / h);
    }
  }
  return pr;
}

Solution warm_shift(const Solution& sol, const RiskProblem& P) {
  Solution w = sol;
  const int nv = P.n_v, N = P.N, nxi = P.n_xi;
  for (int k = 0; k + 1 < N; ++k) {
    w.v_hat.segment(k * nv, nv) = sol.v_hat.segment((k + 1) * nv, nv);
  }
  for (int k = 1; k + 1 <= N; ++k) {
    w.gamma_full.segment((k - 1) * nxi, nxi) = sol.gamma_full.segment(k * nxi, nxi);
  }
  const int soft_base = 2 * N * (nxi + nv);
  for (int gi = 0; gi < P.n_gamma(); ++gi) {
    w.gamma_act[gi] = std::max(w.gamma_full[P.gamma_rows[gi] - soft_base], 0.0);
  }
  if (P.nc() > 0 && sol.delta.size() == P.nc()) {
    std::map<std::tuple<int, int, int>, int> where;
    for (int ci = 0; ci < P.nc(); ++ci) {
      const ChanceRowSpec& row = P.chance[ci];
      where[{static_cast<int>(row.block), row.k, row.ch}] = ci;
    }
    Vec d(P.nc());
    for (int ci = 0; ci < P.nc(); ++ci) {
      const ChanceRowSpec& row = P.chance[ci];
      auto it = where.find({static_cast<int>(row.block), row.k + 1, row.ch});
      d[ci] = it != where.end() ? sol.delta[it->second] : sol.delta[ci];
    }
    d = d.cwiseMax(10 * P.budget.epsilon_floor);
    d *= P.budget.delta_bar / d.sum();
    if (!(d.array() > P.budget.epsilon_floor).all()) {
      d = uniform_allocation(P.budget, P.nc());
    }
    w.delta = d;
  }
  return w;
}

}  // namespace ccmpc
