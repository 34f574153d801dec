#pragma once

#include <functional>
#include <vector>

#include "ccmpc/risk_model.hpp"

namespace ccmpc {

enum class SolveStatus { optimal, infeasible, max_iter };

struct SolverConfig {
  double tol_kkt = 1e-8;   ///< stationarity / complementarity tolerance
  double tol_gap = 1e-9;   ///< surrogate duality gap target
  double mu0 = 1.0;        ///< initial per-constraint complementarity level
  double mu_shrink = 0.1;  ///< gap reduction factor per centering target
  int max_newton = 400;
  double ls_alpha = 0.3;  ///< backtracking sufficient-decrease fraction
  double ls_beta = 0.8;   ///< backtracking step shrink factor
};

/// Smooth convex program in the solver-internal form
///   min 0.5 z'Hz + g'z + w_delta * sum_j 1/delta_j (+ 0.5 delta_reg ||delta - delta_ref||^2)
///   s.t. psi_j(delta_j) - ac_j'z - bc_j <= 0          (risk-tightened rows)
///        xd_i - ad_i'z - bd_i <= 0                    (deterministic rows)
///        z_i >= 0 for i in nonneg,  delta_j >= eps_floor,
///        1'delta = delta_bar                          (risk budget, eq. by
///                                                      optimality of a tight
///                                                      budget for decreasing
///                                                      regularizers)
struct IpmProblem {
  Mat H;
  Vec g;
  double w_delta = 0;
  double delta_reg = 0;
  Vec delta_ref;  ///< empty unless delta_reg > 0
  int nz = 0;
  std::vector<RowDist> dists;
  Mat Ac;
  Vec bc;
  Mat Ad;
  Vec bd;
  Vec xd;
  std::vector<int> nonneg;
  double eps_floor = 1e-9;
  double delta_bar = 0;

  int nc() const { return static_cast<int>(dists.size()); }
  int nd() const { return static_cast<int>(xd.size()); }
  int nn() const { return static_cast<int>(nonneg.size()); }
  int m() const { return nc() + nd() + nn() + nc(); }
};

struct IpmResult {
  Vec z, delta;
  Vec s_chance, s_det, s_nonneg, s_floor;  ///< inequality multipliers (> 0)
  double nu = 0;                           ///< budget multiplier
  SolveStatus status = SolveStatus::max_iter;
  int iters = 0;
  double kkt_residual = 0;
  double gap = 0;
  bool convexity_monitor_ok = true;  ///< Newton matrices stayed definite, psi'' >= 0
  bool early_accepted = false;
};

/// Constraint values at (z, delta); layout [chance, det, nonneg, floor].
Vec ipm_constraints(const IpmProblem& P, const Vec& z, const Vec& delta);

/// Primal-dual interior point with log-barrier treatment of all inequalities.
/// (z0, delta0) must be strictly feasible. early_accept, when set, stops the
/// iteration as soon as the predicate holds at an accepted iterate.
IpmResult ipm_solve(const IpmProblem& P, const SolverConfig& cfg, const Vec& z0,
                    const Vec& delta0,
                    const std::function<bool(const Vec&, const Vec&)>& early_accept = {});

}  // namespace ccmpc
