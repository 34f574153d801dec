#pragma once

#include <functional>
#include <vector>

#include "ccmpc/spec_bundle.hpp"
#include "ccmpc/stacked.hpp"

namespace ccmpc {

/// Strictly increasing scalar map with derivative, invertible to 1e-12 by
/// safeguarded Newton over an automatically expanded bracket.
struct MonotoneMap {
  std::function<double(double)> f, df;
  double operator()(double x) const { return f(x); }
  double invert(double y) const;
};

/// x -> a x + b x^3 with a > 0, b >= 0.
MonotoneMap cubic_map(double a, double b);
MonotoneMap identity_map();

inline double smooth_step(double t) { return 0.5 * (1.0 + t / std::sqrt(1.0 + t * t)); }

/// Input channel map v = scale(x) * shape(u) with scale(x) > 0, so that the
/// map is invertible in u at every operating state.
struct InputMap {
  MonotoneMap shape;
  std::function<double(const Vec&)> scale;
  double apply(double u, const Vec& x) const;
  double invert(double v, const Vec& x) const;
};

/// Plant whose dynamics are linear after an invertible change of coordinates:
///   x+ = phi^{-1}( A phi(x) + B psi(u; x) + c(theta) ),
/// with phi acting per state channel and psi per input channel.
struct ExlinModel {
  LinearModel core;  ///< dynamics of xi = phi(x) under v = psi(u; x)
  std::vector<MonotoneMap> phi;
  std::vector<InputMap> psi_in;

  int n_x() const { return core.n_xi(); }
  int n_u() const { return core.n_v(); }
  Vec phi_apply(const Vec& x) const;
  Vec phi_invert(const Vec& xi) const;
  Vec input_apply(const Vec& u, const Vec& x) const;
  Vec input_invert(const Vec& v, const Vec& x) const;
  Vec step(const Vec& x, const Vec& u, const Vec& theta) const;
  void validate() const;
};

/// Nonlinear rollout in physical coordinates; u_seq is n_u x N, the result is
/// n_x x (N+1) with x0 in column 0.
Mat rollout_nonlinear(const ExlinModel& m, const Vec& x0, const Mat& u_seq,
                      const ParameterTrajectory& theta);

/// Pushes a specification stated in physical coordinates through the change of
/// coordinates: state-side bounds through phi, input bounds through psi at the
/// predicted operating states x_pred (n_x columns >= 1; input bounds at step k
/// use column min(k, cols-1)). Infinite bounds pass through.
SpecBundle transform_spec(const ExlinModel& m, const SpecBundle& phys, const Mat& x_pred);

/// Operating states for the next instance from the previous transformed-state
/// plan: column k is phi^{-1}(xi_plan at step k+1), column 0 the current x.
Mat resolve_operating_states(const ExlinModel& m, const Vec& x_now, const Mat& xi_plan);

}  // namespace ccmpc
