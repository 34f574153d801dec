#pragma once

#include "ccmpc/spec_bundle.hpp"
#include "ccmpc/stacked.hpp"

namespace ccmpc {

/// Evaluates the two sides of the stacked constraint description
///   X(theta_hat) <= y(v_hat, gamma_hat)
/// with the block layout
///   X = (xi_lo - c_hat, c_hat - xi_hi, v_lo, -v_hi, s.(c_hat - soft_bound))
///   y = (p, -p, v_hat, -v_hat, gamma_hat - s.p),   p = A_hat xi_0 + B_hat v_hat,
/// where s is the per-soft-row sign (-1 realizes lower soft bounds on the
/// negated channel). Pruned rows evaluate to -inf on the X side.
class ConstraintEvaluator {
 public:
  ConstraintEvaluator(const LinearModel& model, const SpecBundle& spec,
                      StackedSystem stacked, ConstraintIndexMap index);

  /// X(theta_hat) over all canonical rows.
  Vec offset(const ParameterTrajectory& theta) const;

  /// y(v_hat, gamma_hat); gamma_full has the canonical size N*n_xi.
  Vec lhs(const Vec& xi0, const Vec& v_hat, const Vec& gamma_full) const;

  /// Stacked bias c_hat(theta_hat).
  Vec bias(const ParameterTrajectory& theta) const { return stack_bias(model_, theta); }

  /// Per-sample objective coupling term c_hat(theta_hat) - xi_req(theta_hat).
  Vec objective_term(const ParameterTrajectory& theta) const;

  const ConstraintIndexMap& index() const { return index_; }
  const StackedSystem& sys() const { return stacked_; }
  const SpecBundle& spec() const { return spec_; }
  const LinearModel& model() const { return model_; }

 private:
  LinearModel model_;
  SpecBundle spec_;
  StackedSystem stacked_;
  ConstraintIndexMap index_;
};

/// Free-function forms of the two evaluations.
Vec build_offset(const SpecBundle& spec, const LinearModel& model,
                 const ParameterTrajectory& theta, const ConstraintIndexMap& index);
Vec build_lhs(const StackedSystem& stacked, const ConstraintIndexMap& index,
              const Vec& xi0, const Vec& v_hat, const Vec& gamma_full);

}  // namespace ccmpc
