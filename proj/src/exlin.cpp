// SPDX-License-Identifier: MIT
#include "ccmpc/exlin.hpp"

#include <cmath>

namespace ccmpc {

double MonotoneMap::invert(double y) const {
  if (std::isinf(y) || std::isnan(y)) return y;
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (f(lo) > y) {
    lo *= 2.0;
    require(++guard < 2000, "MonotoneMap::invert: no lower bracket");
  }
  while (f(hi) < y) {
    hi *= 2.0;
    require(++guard < 2000, "MonotoneMap::invert: no upper bracket");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = f(x) - y;
    if (std::abs(r) <= 1e-12 * (1.0 + std::abs(y))) return x;
    if (r > 0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = df(x);
    double xn = d > 0 ? x - r / d : 0.5 * (lo + hi);
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-16 * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

MonotoneMap cubic_map(double a, double b) {
  require(a > 0 && b >= 0, "cubic_map: needs a > 0, b >= 0");
  return {[a, b](double x) { return a * x + b * x * x * x; },
          [a, b](double x) { return a + 3.0 * b * x * x; }};
}

MonotoneMap identity_map() {
  return {[](double x) { return x; }, [](double) { return 1.0; }};
}

double InputMap::apply(double u, const Vec& x) const {
  if (std::isinf(u)) return u;
  const double s = scale(x);
  require(s > 0, "InputMap: scale must stay positive");
  return s * shape.f(u);
}

double InputMap::invert(double v, const Vec& x) const {
  if (std::isinf(v)) return v;
  const double s = scale(x);
  require(s > 0, "InputMap: scale must stay positive");
  return shape.invert(v / s);
}

Vec ExlinModel::phi_apply(const Vec& x) const {
  Vec xi(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xi[i] = std::isinf(x[i]) ? x[i] : phi[i].f(x[i]);
  }
  return xi;
}

Vec ExlinModel::phi_invert(const Vec& xi) const {
  Vec x(xi.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) x[i] = phi[i].invert(xi[i]);
  return x;
}

Vec ExlinModel::input_apply(const Vec& u, const Vec& x) const {
  Vec v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = psi_in[i].apply(u[i], x);
  return v;
}

Vec ExlinModel::input_invert(const Vec& v, const Vec& x) const {
  Vec u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = psi_in[i].invert(v[i], x);
  return u;
}

Vec ExlinModel::step(const Vec& x, const Vec& u, const Vec& theta) const {
  const Vec xi = phi_apply(x);
  const Vec v = input_apply(u, x);
  return phi_invert(core.A * xi + core.B * v + core.bias(theta));
}

void ExlinModel::validate() const {
  core.validate();
  require(static_cast<int>(phi.size()) == n_x(), "ExlinModel: one phi per state channel");
  require(static_cast<int>(psi_in.size()) == n_u(), "ExlinModel: one psi per input channel");
}

Mat rollout_nonlinear(const ExlinModel& m, const Vec& x0, const Mat& u_seq,
                      const ParameterTrajectory& theta) {
  const int N = static_cast<int>(u_seq.cols());
  require(static_cast<int>(u_seq.rows()) == m.n_u(), "rollout_nonlinear: input rows");
  require(theta.horizon() >= N, "rollout_nonlinear: parameter trajectory too short");
  Mat X(m.n_x(), N + 1);
  X.col(0) = x0;
  for (int k = 0; k < N; ++k) {
    X.col(k + 1) = m.step(X.col(k), u_seq.col(k), theta.at(k));
  }
  return X;
}

SpecBundle transform_spec(const ExlinModel& m, const SpecBundle& phys, const Mat& x_pred) {
  require(static_cast<int>(x_pred.rows()) == m.n_x() && x_pred.cols() >= 1,
          "transform_spec: operating states must have n_x rows");
  SpecBundle out = phys;

  auto through_phi = [phi = m.phi](const SpecBundle::BoundFn& fn) -> SpecBundle::BoundFn {
    if (!fn) return fn;
    return [phi, fn](const Vec& theta, int k) {
      Vec b = fn(theta, k);
      for (Eigen::Index ch = 0; ch < b.size(); ++ch) {
        if (!std::isinf(b[ch])) b[ch] = phi[ch].f(b[ch]);
      }
      return b;
    };
  };
  auto through_psi = [psi = m.psi_in, x_pred](const SpecBundle::BoundFn& fn) -> SpecBundle::BoundFn {
    if (!fn) return fn;
    return [psi, x_pred, fn](const Vec& theta, int k) {
      Vec b = fn(theta, k);
      const Vec x = x_pred.col(std::min<Eigen::Index>(k, x_pred.cols() - 1));
      for (Eigen::Index ch = 0; ch < b.size(); ++ch) {
        b[ch] = psi[ch].apply(b[ch], x);
      }
      return b;
    };
  };

  out.xi_req = through_phi(phys.xi_req);
  out.xi_lo = through_phi(phys.xi_lo);
  out.xi_hi = through_phi(phys.xi_hi);
  out.soft_bound = through_phi(phys.soft_bound);
  out.v_lo = through_psi(phys.v_lo);
  out.v_hi = through_psi(phys.v_hi);
  return out;
}

Mat resolve_operating_states(const ExlinModel& m, const Vec& x_now, const Mat& xi_plan) {
  const int cols = std::max<int>(1, static_cast<int>(xi_plan.cols()));
  Mat xp(m.n_x(), cols);
  xp.col(0) = x_now;
  for (int k = 1; k < static_cast<int>(xi_plan.cols()); ++k) {
    xp.col(k) = m.phi_invert(xi_plan.col(k));
  }
  return xp;
}

}  // namespace ccmpc
