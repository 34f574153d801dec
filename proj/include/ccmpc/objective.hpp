#pragma once

#include <vector>

#include "ccmpc/spec_bundle.hpp"
#include "ccmpc/stacked.hpp"

namespace ccmpc {

struct Weights {
  Vec w_req;       ///< per state channel, >= 0 (tracking)
  Vec w_v;         ///< per input channel, > 0
  Vec w_soft;      ///< per state channel, > 0 where a soft bound exists
  double w_delta = 0.0;  ///< risk regularizer weight, >= 0
};

/// Quadratic objective  0.5 z' H z + g' z  over z = (v_hat, gamma_act), where
/// gamma_act holds one slack per unpruned soft row (canonical order). The
/// theta-only constant of the tracking expansion is dropped.
struct QuadObjective {
  Mat H;
  Vec g;
  std::vector<int> gamma_rows;  ///< canonical soft-row id per gamma variable
  bool dropped_theta_constant = true;
};

/// H = 2 (B_hat' W_req B_hat + W_v)  (+)  2 W_soft over active slacks;
/// g = (2 B_hat' W_req (A_hat xi0 + mean_obj_term), 0) with
/// mean_obj_term = E[c_hat(theta_hat) - xi_req(theta_hat)] over the scenario set.
QuadObjective build_objective(const StackedSystem& stacked, const ConstraintIndexMap& index,
                              const Weights& w, const Vec& xi0, const Vec& mean_obj_term);

}  // namespace ccmpc
