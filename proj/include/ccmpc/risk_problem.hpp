#pragma once

#include <functional>
#include <vector>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/objective.hpp"
#include "ccmpc/risk_model.hpp"

namespace ccmpc {

/// One risk-tightened row psi_j(delta_j) <= a_j'z + b_j of the decision problem,
/// over z = (v_hat, gamma_act).
struct ChanceRowSpec {
  int canonical_id = -1;
  RowDist dist;
  Vec a;
  double b = 0;
  Block block = Block::state_lo;
  int k = 0, ch = 0;
  int family = -1;
};

/// One certain row x_j <= a_j'z + b_j.
struct DetRowSpec {
  int canonical_id = -1;
  double x = 0;
  Vec a;
  double b = 0;
  Block block = Block::state_lo;
  int k = 0, ch = 0;
};

/// Decision problem over (z, delta):
///   min 0.5 z'Hz + g'z + w_delta sum_j 1/delta_j
///   s.t. chance rows, det rows, gamma_act >= 0,
///        delta >= eps_floor, 1'delta = delta_bar.
struct RiskProblem {
  Mat H;
  Vec g;
  int N = 0, n_v = 0, n_xi = 0;
  std::vector<int> gamma_rows;  ///< canonical soft-row id per slack variable
  std::vector<ChanceRowSpec> chance;
  std::vector<DetRowSpec> det;
  RiskBudget budget;
  double w_delta = 0;
  bool convexity_certified = true;  ///< delta_bar below every row's delta_conv
  double min_delta_conv = 1.0;

  int n_gamma() const { return static_cast<int>(gamma_rows.size()); }
  int nz() const { return N * n_v + n_gamma(); }
  int nc() const { return static_cast<int>(chance.size()); }
};

/// Override hook assigning a row distribution from richer knowledge than the
/// sample moments (bounded-support or exact-law tightening).
using RowDistFactory = std::function<RowDist(int canonical_id, const MomentSummary&)>;

/// Builds the decision problem at initial state xi0. Rows whose offset varies
/// with theta become chance rows (mean/variance rows unless a factory is
/// given); the rest enter as certain rows at their exact offset.
RiskProblem assemble(const ConstraintEvaluator& eval, const MomentSummary& moments,
                     const Weights& w, const Vec& xi0, const RiskBudget& budget,
                     DistributionMode mode, const RowDistFactory& factory = {});

/// Certainty-equivalent instance: every row is certain at the given parameter
/// trajectory (typically the scenario mean), and the tracking objective uses
/// the same trajectory.
RiskProblem assemble_deterministic(const ConstraintEvaluator& eval, const Weights& w,
                                   const Vec& xi0, const ParameterTrajectory& traj);

}  // namespace ccmpc
