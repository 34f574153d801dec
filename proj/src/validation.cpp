// SPDX-License-Identifier: MIT
#include "ccmpc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ccmpc/exlin.hpp"
#include "ccmpc/risk_model.hpp"
#include "ccmpc/scenario.hpp"
#include "ccmpc/solver.hpp"
#include "ccmpc/stacked.hpp"

namespace ccmpc {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

CheckResult check(const std::string& name, bool pass, const std::string& detail) {
  return CheckResult{name, pass, detail};
}

double mc_margin(double delta, int S) { return 3.0 * std::sqrt(delta * (1.0 - delta) / S); }

double exceed_frac(const std::vector<double>& xs, double thr) {
  int n = 0;
  for (double x : xs)
    if (x > thr) ++n;
  return static_cast<double>(n) / static_cast<double>(xs.size());
}

}  // namespace

std::vector<CheckResult> run_inequality_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const int S = 100000;
  const double deltas[] = {0.01, 0.1, 0.3};

  struct NamedLaw {
    std::string name;
    Law law;
  };
  const std::vector<NamedLaw> laws = {
      {"gaussian", GaussianLaw{1.0, 2.0}},
      {"uniform", UniformLaw{-1.0, 3.0}},
      {"shifted-exponential", ShiftedExponentialLaw{0.8, -0.5}},
  };

  for (std::size_t li = 0; li < laws.size(); ++li) {
    const Law& law = laws[li].law;
    std::mt19937_64 rng(mix_seed(seed, li));
    std::vector<double> xs(S);
    for (double& x : xs) x = law_sample(law, rng);

    RowDist mv = MvRow{law_mean(law), law_var(law)};
    double worst_mv = -kInf;
    for (double d : deltas) worst_mv = std::max(worst_mv, exceed_frac(xs, psi(mv, d)) - d - mc_margin(d, S));
    out.push_back(check("coverage mv " + laws[li].name, worst_mv <= 0.0,
                        "worst excess over bound " + fmt(worst_mv)));

    if (law_bounded(law)) {
      double lo, hi;
      law_support(law, lo, hi);
      RowDist bd = BdRow{law_mean(law), lo, hi};
      double worst_bd = -kInf;
      for (double d : deltas) worst_bd = std::max(worst_bd, exceed_frac(xs, psi(bd, d)) - d - mc_margin(d, S));
      out.push_back(check("coverage bd " + laws[li].name, worst_bd <= 0.0,
                          "worst excess over bound " + fmt(worst_bd)));
    }

    RowDist cdf = CdfRow{law};
    double worst_cdf = -kInf;
    for (double d : deltas)
      worst_cdf = std::max(worst_cdf, std::abs(exceed_frac(xs, psi(cdf, d)) - d) - mc_margin(d, S));
    out.push_back(check("coverage cdf " + laws[li].name, worst_cdf <= 0.0,
                        "worst two-sided excess " + fmt(worst_cdf)));
  }

  // Union bound on correlated multi-row instances with per-row exact tightenings.
  const int n_rows = 20;
  const double delta_bar = 0.1;
  double worst_hi = -kInf, worst_lo = -kInf;
  for (int inst = 0; inst < 3; ++inst) {
    std::mt19937_64 rng(mix_seed(seed, 100 + inst));
    std::uniform_real_distribution<double> u_mu(-1.0, 1.0), u_ab(0.2, 1.0), u_w(0.1, 1.0);
    Vec mu(n_rows), alpha(n_rows), beta(n_rows), dj(n_rows), y(n_rows);
    for (int j = 0; j < n_rows; ++j) {
      mu(j) = u_mu(rng);
      alpha(j) = u_ab(rng);
      beta(j) = u_ab(rng);
      dj(j) = u_w(rng);
    }
    dj *= delta_bar / dj.sum();
    for (int j = 0; j < n_rows; ++j) {
      Law row = GaussianLaw{mu(j), std::sqrt(alpha(j) * alpha(j) + beta(j) * beta(j))};
      y(j) = psi(CdfRow{row}, dj(j));
    }
    std::normal_distribution<double> gauss;
    int joint = 0;
    for (int s = 0; s < S; ++s) {
      const double g0 = gauss(rng);
      bool hit = false;
      for (int j = 0; j < n_rows && !hit; ++j)
        hit = mu(j) + alpha(j) * g0 + beta(j) * gauss(rng) > y(j);
      joint += hit ? 1 : 0;
    }
    const double p = static_cast<double>(joint) / S;
    const double dmax = dj.maxCoeff();
    worst_hi = std::max(worst_hi, p - delta_bar - mc_margin(delta_bar, S));
    worst_lo = std::max(worst_lo, dmax - mc_margin(dmax, S) - p);
  }
  out.push_back(check("union bound 20-row instances", worst_hi <= 0.0 && worst_lo <= 0.0,
                      "excess over budget " + fmt(worst_hi) + ", below max row " + fmt(worst_lo)));
  return out;
}

std::vector<CheckResult> run_convexity_suite() {
  std::vector<CheckResult> out;

  struct Case {
    std::string name;
    RowDist dist;
    double beyond;  ///< probe point past delta_conv; <= 0 when none exists
  };
  const std::vector<Case> cases = {
      {"mv", MvRow{0.3, 1.7}, 0.8},
      {"bd", BdRow{0.0, -1.0, 1.0}, 0.7},
      {"cdf gaussian", CdfRow{GaussianLaw{0.4, 1.3}}, 0.7},
      {"cdf uniform", CdfRow{UniformLaw{-1.0, 3.0}}, -1.0},
      {"cdf shifted-exponential", CdfRow{ShiftedExponentialLaw{0.8, -0.5}}, -1.0},
      {"cdf truncated-lognormal", CdfRow{TruncatedLogNormalLaw{0.0, 0.5, 0.2, 3.0}}, 0.9},
  };

  for (const Case& c : cases) {
    const double dc = std::min(delta_conv(c.dist), 1.0 - 1e-9);
    const double lo = 1e-6;
    const int n_grid = 1000;
    double worst_d2 = kInf;
    bool monotone = true;
    for (int i = 0; i < n_grid; ++i) {
      const double d = std::exp(std::log(lo) + (std::log(dc) - std::log(lo)) * i / (n_grid - 1.0));
      const PsiDerivs pd = psi_derivatives(c.dist, d);
      worst_d2 = std::min(worst_d2, pd.d2 / (1.0 + std::abs(pd.d2)));
      monotone = monotone && pd.d1 <= 0.0;
    }
    out.push_back(check("curvature grid " + c.name, worst_d2 >= -1e-9 && monotone,
                        "min scaled second derivative " + fmt(worst_d2) + " on (1e-6, " + fmt(dc) + "]"));

    double worst_rel1 = 0, worst_rel2 = 0;
    for (double d : {1e-3, 0.05, std::min(0.3, 0.8 * dc)}) {
      const double h = 1e-4 * d;
      const PsiDerivs pd = psi_derivatives(c.dist, d);
      const double fp = psi(c.dist, d + h), fm = psi(c.dist, d - h), f0 = psi(c.dist, d);
      const double fd1 = (fp - fm) / (2 * h), fd2 = (fp - 2 * f0 + fm) / (h * h);
      worst_rel1 = std::max(worst_rel1, std::abs(fd1 - pd.d1) / (1.0 + std::abs(pd.d1)));
      worst_rel2 = std::max(worst_rel2, std::abs(fd2 - pd.d2) / (1.0 + std::abs(pd.d2)));
    }
    out.push_back(check("derivative cross-check " + c.name, worst_rel1 <= 1e-6 && worst_rel2 <= 1e-4,
                        "rel fd errors " + fmt(worst_rel1) + " / " + fmt(worst_rel2)));

    if (c.beyond > 0.0) {
      const double probe = std::min(0.95, c.beyond > dc ? c.beyond : dc + 0.1);
      const double d2 = psi_derivatives(c.dist, probe).d2;
      out.push_back(check("curvature loss past range " + c.name, d2 < 0.0,
                          "second derivative " + fmt(d2) + " at " + fmt(probe)));
    }
  }

  {
    const double d2a = psi_derivatives(CdfRow{UniformLaw{-1.0, 3.0}}, 0.9).d2;
    const PsiDerivs flat_mv = psi_derivatives(MvRow{0.5, 0.0}, 0.2);
    const PsiDerivs flat_bd = psi_derivatives(BdRow{0.5, 0.5, 0.5}, 0.2);
    const bool ok = std::abs(d2a) <= 1e-12 && flat_mv.value == 0.5 && flat_mv.d1 == 0.0 &&
                    flat_mv.d2 == 0.0 && flat_bd.d1 == 0.0 && flat_bd.d2 == 0.0;
    out.push_back(check("flat and zero-spread rows", ok,
                        "uniform second derivative " + fmt(d2a) + ", zero-spread derivatives pinned"));
  }
  return out;
}

namespace {

Mat random_pd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Mat R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
  return R.transpose() * R + n * Mat::Identity(n, n);
}

Vec random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

RiskProblem base_problem(int n, double delta_bar, double w_delta) {
  RiskProblem P;
  P.N = 1;
  P.n_v = n;
  P.n_xi = 1;
  P.budget = RiskBudget{delta_bar, 1e-9};
  P.w_delta = w_delta;
  return P;
}

ChanceRowSpec mv_row(int id, double mean, double var, const Vec& a, double b) {
  ChanceRowSpec r;
  r.canonical_id = id;
  r.dist = MvRow{mean, var};
  r.a = a;
  r.b = b;
  r.block = Block::state_hi;
  r.k = 1;
  r.ch = id;
  return r;
}

/// Random instance strictly feasible at z_bar under the uniform allocation.
RiskProblem random_chance_instance(std::mt19937_64& rng, int n, int nc, double delta_bar) {
  std::uniform_real_distribution<double> u_mean(-1.0, 1.0), u_var(0.1, 2.0), u_slack(0.1, 1.0);
  RiskProblem P = base_problem(n, delta_bar, 1e-6);
  P.H = random_pd(rng, n);
  P.g = random_vec(rng, n);
  const Vec z_bar = random_vec(rng, n);
  const double d0 = delta_bar / nc;
  for (int j = 0; j < nc; ++j) {
    const Vec a = random_vec(rng, n);
    const double mean = u_mean(rng), var = u_var(rng);
    const double b = psi(MvRow{mean, var}, d0) - a.dot(z_bar) + u_slack(rng);
    P.chance.push_back(mv_row(j, mean, var, a, b));
    P.min_delta_conv = std::min(P.min_delta_conv, delta_conv(P.chance.back().dist));
  }
  P.convexity_certified = delta_bar <= P.min_delta_conv;
  return P;
}

}  // namespace

std::vector<CheckResult> run_solver_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  SolverConfig cfg;

  {
    double worst_stat = 0, worst_comp = 0, worst_prim = 0;
    bool all_opt = true;
    for (int inst = 0; inst < 25; ++inst) {
      std::mt19937_64 rng(mix_seed(seed, 200 + inst));
      std::uniform_real_distribution<double> u_slack(0.1, 1.0);
      const int n = 8;
      RiskProblem P = base_problem(n, 0.1, 0.0);
      P.H = random_pd(rng, n);
      P.g = random_vec(rng, n);
      for (int j = 0; j < 12; ++j) {
        DetRowSpec r;
        r.canonical_id = j;
        r.x = 0.0;
        r.a = -random_vec(rng, n);
        r.b = u_slack(rng);
        r.block = Block::state_hi;
        r.k = 1;
        r.ch = j;
        P.det.push_back(r);
      }
      const Solution sol = solve_deterministic(P, cfg);
      all_opt = all_opt && sol.status == SolveStatus::optimal;
      const KktReport rep = kkt_report(P, sol);
      worst_stat = std::max(worst_stat, rep.stationarity);
      worst_comp = std::max(worst_comp, rep.complementarity);
      worst_prim = std::max(worst_prim, rep.primal);
    }
    out.push_back(check("random certain programs (25)",
                        all_opt && worst_stat <= 1e-6 && worst_comp <= 1e-6 && worst_prim <= 1e-9,
                        "worst stationarity " + fmt(worst_stat) + ", complementarity " +
                            fmt(worst_comp) + ", primal " + fmt(worst_prim)));
  }

  {
    double worst_stat = 0, worst_comp = 0, worst_prim = 0, worst_budget = 0, min_lambda = kInf;
    bool all_opt = true;
    for (int inst = 0; inst < 10; ++inst) {
      std::mt19937_64 rng(mix_seed(seed, 300 + inst));
      RiskProblem P = random_chance_instance(rng, 4, 6, 0.05);
      const Solution sol = solve(P, cfg);
      all_opt = all_opt && sol.status == SolveStatus::optimal;
      const KktReport rep = kkt_report(P, sol);
      worst_stat = std::max(worst_stat, rep.stationarity);
      worst_comp = std::max(worst_comp, rep.complementarity);
      worst_prim = std::max(worst_prim, rep.primal);
      worst_budget = std::max(worst_budget, std::abs(sol.delta.sum() - 0.05));
      min_lambda = std::min(min_lambda, sol.lambda);
    }
    out.push_back(check("random joint-allocation programs (10)",
                        all_opt && worst_stat <= 1e-6 && worst_comp <= 1e-6 &&
                            worst_prim <= 1e-9 && worst_budget <= 1e-9 && min_lambda > 0,
                        "worst stationarity " + fmt(worst_stat) + ", budget gap " +
                            fmt(worst_budget) + ", min multiplier " + fmt(min_lambda)));
  }

  {
    std::mt19937_64 rng(mix_seed(seed, 310));
    RiskProblem P = random_chance_instance(rng, 4, 6, 0.05);
    const Solution joint = solve(P, cfg);
    const Solution fixed = solve_fixed_risk(P, uniform_allocation(P.budget, P.nc()), cfg);
    const bool ok = joint.status == SolveStatus::optimal && fixed.status == SolveStatus::optimal &&
                    fixed.objective >= joint.objective - 1e-9 * (1.0 + std::abs(joint.objective));
    out.push_back(check("flat allocation never beats joint", ok,
                        "joint " + fmt(joint.objective) + " vs flat " + fmt(fixed.objective)));

    double prev = kInf;
    bool monotone = true;
    for (double db : {0.02, 0.05, 0.1}) {
      RiskProblem Q = P;
      Q.budget.delta_bar = db;
      const Solution s = solve(Q, cfg);
      monotone = monotone && s.status == SolveStatus::optimal &&
                 s.objective <= prev + 1e-9 * (1.0 + std::abs(prev));
      prev = s.objective;
    }
    out.push_back(check("objective nonincreasing in budget", monotone,
                        "budgets 0.02 / 0.05 / 0.1"));
  }

  {
    RiskProblem P = base_problem(1, 0.5, 0.0);
    P.H = Mat::Constant(1, 1, 2.0);
    P.g = Vec::Zero(1);
    P.chance.push_back(mv_row(0, 0.0, 1.0, Vec::Ones(1), 0.0));
    const Solution sol = solve(P, cfg);
    const bool ok = sol.status == SolveStatus::optimal && std::abs(sol.v_hat(0) - 1.0) <= 1e-6 &&
                    std::abs(sol.delta(0) - 0.5) <= 1e-9 && std::abs(sol.lambda - 4.0) <= 1e-4;
    out.push_back(check("closed-form single-row instance", ok,
                        "v " + fmt(sol.v_hat(0)) + ", risk " + fmt(sol.delta(0)) + ", multiplier " +
                            fmt(sol.lambda)));
  }

  {
    RiskProblem P = base_problem(1, 0.1, 0.0);
    P.H = Mat::Constant(1, 1, 2.0);
    P.g = Vec::Zero(1);
    DetRowSpec r1;  // z <= 0
    r1.canonical_id = 0;
    r1.x = 0.0;
    r1.a = -Vec::Ones(1);
    r1.b = 0.0;
    DetRowSpec r2 = r1;  // z >= 1
    r2.canonical_id = 1;
    r2.a = Vec::Ones(1);
    r2.b = -1.0;
    P.det = {r1, r2};
    const Solution sol = solve_deterministic(P, cfg);
    const bool ok = sol.status == SolveStatus::infeasible && sol.infeasibility > 0.4 &&
                    sol.infeasibility < 0.6;
    out.push_back(check("infeasibility certificate", ok,
                        "worst relaxed residual " + fmt(sol.infeasibility)));
  }

  {
    RiskProblem P = base_problem(1, 0.5, 0.0);
    P.H = Mat::Constant(1, 1, 2.0);
    P.g = Vec::Zero(1);
    P.chance.push_back(mv_row(0, 0.0, 1.0, Vec::Ones(1), 0.0));
    P.chance.push_back(mv_row(1, 0.0, 1.0, Vec::Ones(1), 0.0));
    std::mt19937_64 rng(mix_seed(seed, 320));
    std::uniform_real_distribution<double> u_frac(0.15, 0.35);
    std::vector<double> vs;
    bool all_opt = true;
    {
      const Solution s0 = solve(P, cfg);
      all_opt = s0.status == SolveStatus::optimal;
      vs.push_back(s0.v_hat(0));
    }
    for (int s = 0; s < 4; ++s) {
      Solution warm;
      warm.v_hat = Vec::Constant(1, 2.5 + 0.5 * s);
      warm.gamma_act = Vec(0);
      warm.delta = Vec(2);
      const double d1 = u_frac(rng);
      warm.delta << d1, 0.5 - d1;
      const Solution ss = solve(P, cfg, &warm);
      all_opt = all_opt && ss.status == SolveStatus::optimal;
      vs.push_back(ss.v_hat(0));
    }
    const double spread = *std::max_element(vs.begin(), vs.end()) -
                          *std::min_element(vs.begin(), vs.end());
    out.push_back(check("input plan unique without regularizer", all_opt && spread <= 1e-5,
                        "spread " + fmt(spread) + " across 5 starts (target " +
                            fmt(std::sqrt(3.0)) + ")"));
  }
  return out;
}

std::vector<CheckResult> run_exlin_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;

  {
    double worst = 0;
    for (double a : {0.5, 1.0, 2.0})
      for (double b : {0.0, 1e-5, 1e-2}) {
        const MonotoneMap m = cubic_map(a, b);
        for (int i = 0; i <= 100; ++i) {
          const double y = -50.0 + i;
          const double x = m.invert(y);
          worst = std::max(worst, std::abs(m(x) - y) / (1.0 + std::abs(y)));
        }
      }
    out.push_back(check("inversion round-trips", worst <= 1e-9, "worst rel error " + fmt(worst)));
  }

  {
    double worst = 0;
    bool all_ok = true;
    for (int inst = 0; inst < 5; ++inst) {
      std::mt19937_64 rng(mix_seed(seed, 400 + inst));
      std::uniform_real_distribution<double> u_a(-0.4, 0.4), u_b(-1.0, 1.0), u_c(-0.5, 0.5),
          u_cube(0.0, 1e-2), u_in(-1.0, 1.0);
      ExlinModel m;
      m.core.A = Mat(2, 2);
      m.core.B = Mat(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          m.core.A(i, j) = u_a(rng);
          m.core.B(i, j) = u_b(rng);
        }
      const Vec c0 = Vec::NullaryExpr(2, [&](Eigen::Index) { return u_c(rng); });
      const Vec c1 = Vec::NullaryExpr(2, [&](Eigen::Index) { return u_c(rng); });
      m.core.bias = [c0, c1](const Vec& th) -> Vec { return c0 + c1 * th(0); };
      m.core.bias_theta_dependent = true;
      for (int i = 0; i < 2; ++i) {
        m.phi.push_back(cubic_map(1.0, u_cube(rng)));
        InputMap im;
        im.shape = cubic_map(1.0, u_cube(rng));
        im.scale = [](const Vec& x) { return 1.0 + smooth_step(0.5 * (x(0) - 0.2)); };
        m.psi_in.push_back(im);
      }
      m.validate();

      const int N = 6;
      const Vec x0 = Vec::NullaryExpr(2, [&](Eigen::Index) { return u_c(rng); });
      Mat u_seq(2, N);
      for (int k = 0; k < N; ++k)
        for (int i = 0; i < 2; ++i) u_seq(i, k) = u_in(rng);
      ParameterTrajectory theta;
      theta.values = Mat::NullaryExpr(1, N + 1, [&](Eigen::Index, Eigen::Index) { return u_in(rng); });

      const Mat X = rollout_nonlinear(m, x0, u_seq, theta);
      Mat v_seq(2, N);
      for (int k = 0; k < N; ++k) v_seq.col(k) = m.input_apply(u_seq.col(k), X.col(k));
      const Mat Xi = simulate(m.core, m.phi_apply(x0), v_seq, theta);
      for (int k = 0; k <= N; ++k) {
        const double e = (m.phi_apply(X.col(k)) - Xi.col(k)).cwiseAbs().maxCoeff();
        worst = std::max(worst, e);
      }
      all_ok = all_ok && std::isfinite(worst);
    }
    out.push_back(check("rollout conjugacy (5 models)", all_ok && worst <= 1e-8,
                        "worst transformed-state gap " + fmt(worst)));
  }

  {
    ExlinModel m;
    m.core.A = Mat::Identity(2, 2) * 0.9;
    m.core.B = Mat::Identity(2, 2);
    m.core.bias = [](const Vec&) { return Vec::Zero(2); };
    m.phi = {cubic_map(1.0, 1e-3), cubic_map(1.0, 2e-3)};
    for (int i = 0; i < 2; ++i) {
      InputMap im;
      im.shape = cubic_map(1.0, 1e-3);
      im.scale = [](const Vec&) { return 1.5; };
      m.psi_in.push_back(im);
    }

    SpecBundle phys;
    phys.n_xi = 2;
    phys.n_v = 2;
    phys.xi_req = [](const Vec&, int) { return Vec::Zero(2); };
    phys.xi_lo = [](const Vec&, int) { return (Vec(2) << -1.0, -kInf).finished(); };
    phys.xi_hi = [](const Vec&, int) { return (Vec(2) << 2.0, 3.0).finished(); };
    phys.v_lo = [](const Vec&, int) { return (Vec(2) << -4.0, -kInf).finished(); };
    phys.v_hi = [](const Vec&, int) { return (Vec(2) << 5.0, 6.0).finished(); };
    phys.soft_bound = [](const Vec&, int) { return (Vec(2) << kInf, kInf).finished(); };
    phys.soft_kind = {SoftKind::none, SoftKind::none};
    phys.dep_req = {false, false};
    phys.dep_xi_lo = {false, false};
    phys.dep_xi_hi = {false, false};
    phys.dep_v_lo = {false, false};
    phys.dep_v_hi = {false, false};
    phys.dep_soft = {false, false};

    const Mat pred_a = Mat::Zero(2, 3);
    const Mat pred_b = Mat::Constant(2, 3, 2.0);
    const SpecBundle sa = transform_spec(m, phys, pred_a);
    const SpecBundle sb = transform_spec(m, phys, pred_b);
    const Vec th = Vec::Zero(1);
    double worst = 0;
    bool inf_ok = true;
    for (int k = 0; k < 3; ++k) {
      const Vec la = sa.v_lo(th, k), lb = sb.v_lo(th, k);
      const Vec ha = sa.v_hi(th, k), hb = sb.v_hi(th, k);
      worst = std::max(worst, std::abs(la(0) - lb(0)));
      worst = std::max(worst, std::abs(ha(0) - hb(0)));
      worst = std::max(worst, std::abs(ha(1) - hb(1)));
      inf_ok = inf_ok && std::isinf(la(1)) && std::isinf(lb(1));
    }
    out.push_back(check("constant-gain bound transform is state-free", worst <= 1e-12 && inf_ok,
                        "worst bound gap " + fmt(worst)));

    for (auto& im : m.psi_in)
      im.scale = [](const Vec& x) { return 1.0 + smooth_step(0.3 * (x(0) - 1.0)); };
    Mat pred(2, 2);
    pred << 0.0, 2.0, 0.0, 2.0;
    const SpecBundle sc = transform_spec(m, phys, pred);
    double wiring = 0;
    for (int k = 0; k < 4; ++k) {
      const Vec xk = pred.col(std::min(k, 1));
      const Vec hi = sc.v_hi(th, k);
      wiring = std::max(wiring, std::abs(hi(0) - m.psi_in[0].apply(5.0, xk)));
      wiring = std::max(wiring, std::abs(hi(1) - m.psi_in[1].apply(6.0, xk)));
    }
    out.push_back(check("bound transform tracks operating state", wiring <= 1e-12,
                        "worst gap to direct map " + fmt(wiring)));
  }
  return out;
}

std::vector<CheckResult> run_stacking_suite(std::uint64_t seed) {
  double worst = 0;
  for (int inst = 0; inst < 100; ++inst) {
    std::mt19937_64 rng(mix_seed(seed, 500 + inst));
    std::uniform_int_distribution<int> d_nxi(1, 4), d_nv(1, 3), d_N(1, 8), d_nth(1, 2);
    std::uniform_real_distribution<double> u_a(-0.5, 0.5), u(-1.0, 1.0);
    const int n_xi = d_nxi(rng), n_v = d_nv(rng), N = d_N(rng), n_th = d_nth(rng);

    LinearModel model;
    model.A = Mat::NullaryExpr(n_xi, n_xi, [&](Eigen::Index, Eigen::Index) { return u_a(rng); });
    model.B = Mat::NullaryExpr(n_xi, n_v, [&](Eigen::Index, Eigen::Index) { return u(rng); });
    const Vec c0 = Vec::NullaryExpr(n_xi, [&](Eigen::Index) { return u(rng); });
    const Mat C1 = Mat::NullaryExpr(n_xi, n_th, [&](Eigen::Index, Eigen::Index) { return u(rng); });
    model.bias = [c0, C1](const Vec& th) -> Vec { return c0 + C1 * th; };
    model.bias_theta_dependent = true;

    const Vec xi0 = Vec::NullaryExpr(n_xi, [&](Eigen::Index) { return u(rng); });
    const Vec v_hat = Vec::NullaryExpr(N * n_v, [&](Eigen::Index) { return u(rng); });
    ParameterTrajectory theta;
    theta.values = Mat::NullaryExpr(n_th, N + 1, [&](Eigen::Index, Eigen::Index) { return u(rng); });

    const StackedSystem st = stack_dynamics(model, N);
    const Vec pred = st.A_hat * xi0 + st.B_hat * v_hat + stack_bias(model, theta);
    const Mat v_seq = Eigen::Map<const Mat>(v_hat.data(), n_v, N);
    const Mat X = simulate(model, xi0, v_seq, theta);
    for (int k = 0; k < N; ++k)
      worst = std::max(worst, (pred.segment(k * n_xi, n_xi) - X.col(k + 1)).cwiseAbs().maxCoeff());
  }
  return {CheckResult{"condensed vs stepwise (100 models)", worst <= 1e-10,
                      "worst prediction gap " + fmt(worst)}};
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace ccmpc
