#pragma once

#include <functional>

#include "ccmpc/ipm.hpp"
#include "ccmpc/risk_problem.hpp"

namespace ccmpc {

struct Solution {
  Vec v_hat;       ///< stacked inputs, length N*n_v
  Vec gamma_full;  ///< canonical slack vector, length N*n_xi (pruned rows 0)
  Vec gamma_act;   ///< slack decision variables (one per unpruned soft row)
  Vec delta;       ///< risk allocation, aligned with RiskProblem::chance
  Vec mu_chance, mu_det, mu_gamma, mu_floor;  ///< inequality multipliers
  double lambda = 0;  ///< budget multiplier; > 0 certifies a binding budget
  double objective = 0;           ///< includes the risk regularizer
  double objective_excl_reg = 0;  ///< quadratic part only
  double kkt_residual = 0;
  double gap = 0;
  SolveStatus status = SolveStatus::max_iter;
  int newton_iters = 0;
  bool used_phase1 = false;
  bool convexity_monitor_ok = true;
  double infeasibility = 0;  ///< worst row residual of the feasibility relaxation
};

/// Joint risk-allocation solve. The optional warm start is used for its primal
/// variables only (risk rescaled onto the budget, slacks clamped positive).
Solution solve(const RiskProblem& P, const SolverConfig& cfg = {},
               const Solution* warm = nullptr);

/// Certainty-equivalent solve; requires a problem without chance rows.
Solution solve_deterministic(const RiskProblem& P, const SolverConfig& cfg = {});

/// Solves with the risk allocation frozen at delta_fixed (per chance row); the
/// tightenings become certain rows and only (v_hat, gamma_act) are optimized.
Solution solve_fixed_risk(const RiskProblem& P, const Vec& delta_fixed,
                          const SolverConfig& cfg = {}, const Solution* warm = nullptr);

struct KktReport {
  double stationarity = 0;    ///< inf-norm of the Lagrangian gradient
  double complementarity = 0; ///< max_j |mu_j c_j|
  double primal = 0;          ///< max_j max(0, c_j)
  double budget_gap = 0;      ///< |1'delta - delta_bar|
  double lambda = 0;
  double gram_cond = 0;  ///< condition number of G G' over active-row gradients
  bool licq_ok = true;
  int n_active = 0;
};
/// First-order certificate check of a returned solution against its problem.
KktReport kkt_report(const RiskProblem& P, const Solution& sol);

struct ProbeReport {
  KktReport base;
  double ratio = 0;  ///< max ||solution change|| / ||xi0 change|| over probes
  bool status_stable = true;
  bool skipped = false;  ///< active-row gradients too ill-conditioned to probe
};
/// Finite-difference sensitivity of the optimizer in the initial state:
/// re-assembles the instance at xi0 +- h e_i via rebuild and re-solves warm.
ProbeReport lipschitz_probe(const RiskProblem& P, const Solution& sol, const Vec& xi0,
                            const std::function<RiskProblem(const Vec&)>& rebuild,
                            const SolverConfig& cfg = {}, double h = 1e-4);

/// Receding-horizon warm start: drop stage 0, repeat the last stage, move each
/// row's risk to its one-step-earlier row, rescale onto the budget and clamp
/// into the interior.
Solution warm_shift(const Solution& sol, const RiskProblem& P);

}  // namespace ccmpc
