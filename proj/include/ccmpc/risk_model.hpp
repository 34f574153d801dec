#pragma once

#include <variant>
#include <vector>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/distributions.hpp"
#include "ccmpc/scenario.hpp"

namespace ccmpc {

enum class DistributionMode { mv, bd, cdf };

/// Per-row uncertainty description feeding the tightening function.
struct MvRow {
  double mean = 0, var = 0;  ///< first two moments of the row offset
};
struct BdRow {
  double mean = 0, lo = 0, hi = 0;  ///< mean and bounded support [lo, hi]
};
struct CdfRow {
  Law law;  ///< full analytic law of the row offset
};
using RowDist = std::variant<MvRow, BdRow, CdfRow>;

/// Tightened offset psi(delta): the level whose exceedance probability is at
/// most delta (exact in cdf mode). Decreasing in delta; convex on
/// (0, delta_conv]. Domain: delta in (0,1).
double psi(const RowDist& row, double delta);

struct PsiDerivs {
  double value = 0, d1 = 0, d2 = 0;
};
PsiDerivs psi_derivatives(const RowDist& row, double delta);

/// Largest delta up to which psi is convex: 3/4 (mv), e^{-1/2} (bd),
/// 1 - F(x_star) (cdf).
double delta_conv(const RowDist& row);

struct RiskBudget {
  double delta_bar = 0.0;
  double epsilon_floor = 1e-9;
};

/// Flat split delta_bar / n_c; error when the floor would be violated.
Vec uniform_allocation(const RiskBudget& budget, int n_c);

/// Sample moments of X(theta_hat) per canonical row plus the mean of the
/// objective coupling term. Rows flagged theta-independent get variance 0
/// exactly; pruned rows get zeros.
struct MomentSummary {
  Vec mean;           ///< per canonical row
  Vec var;            ///< unbiased, per canonical row
  Vec obj_term_mean;  ///< E[c_hat - xi_req], length N*n_xi
  int sample_count = 0;
};
MomentSummary estimate_moments(const ScenarioSet& scen, const ConstraintEvaluator& eval);

/// Named canonical-row groups for reporting.
struct ViolationGroups {
  std::vector<std::string> names;
  std::vector<std::vector<int>> rows;
};
struct ViolationReport {
  Vec per_group;     ///< fraction of samples violating >= 1 row of the group
  double joint = 0;  ///< fraction violating >= 1 row of any group
  int sample_count = 0;
};
/// Fixes the committed plan (through its y vector) and counts scenario-wise
/// exceedances X_j(theta_hat^{(s)}) > y_j.
ViolationReport empirical_violation(const Vec& y, const ScenarioSet& scen,
                                    const ConstraintEvaluator& eval,
                                    const ViolationGroups& groups);

}  // namespace ccmpc
