#include "ccmpc/constraint_eval.hpp"

#include <utility>

namespace ccmpc {

ConstraintEvaluator::ConstraintEvaluator(const LinearModel& model, const SpecBundle& spec,
                                         StackedSystem stacked, ConstraintIndexMap index)
    : model_(model), spec_(spec), stacked_(std::move(stacked)), index_(std::move(index)) {
  require(stacked_.N == index_.N && stacked_.n_xi == index_.n_xi && stacked_.n_v == index_.n_v,
          "ConstraintEvaluator: stacked/index dimension mismatch");
}

Vec ConstraintEvaluator::offset(const ParameterTrajectory& theta) const {
  const int N = index_.N, n_xi = index_.n_xi, n_v = index_.n_v;
  require(theta.horizon() >= N, "offset: trajectory shorter than horizon");
  const Vec c_hat = stack_bias(model_, theta);
  Vec X = Vec::Constant(index_.n_rows(), -kInf);

  for (int k = 1; k <= N; ++k) {
    const Vec th = theta.at(k);
    const Vec lo = spec_.xi_lo(th, k);
    const Vec hi = spec_.xi_hi(th, k);
    const Vec sb = spec_.soft_bound(th, k);
    for (int ch = 0; ch < n_xi; ++ch) {
      const double c = c_hat[(k - 1) * n_xi + ch];
      {
        const int id = index_.row_id(Block::state_lo, k, ch);
        if (!index_.rows[id].pruned) X[id] = lo[ch] - c;
      }
      {
        const int id = index_.row_id(Block::state_hi, k, ch);
        if (!index_.rows[id].pruned) X[id] = c - hi[ch];
      }
      {
        const int id = index_.row_id(Block::soft, k, ch);
        const RowRef& r = index_.rows[id];
        if (!r.pruned) X[id] = r.soft_sign * (c - sb[ch]);
      }
    }
  }
  for (int k = 0; k < N; ++k) {
    const Vec th = theta.at(k);
    const Vec lo = spec_.v_lo(th, k);
    const Vec hi = spec_.v_hi(th, k);
    for (int ch = 0; ch < n_v; ++ch) {
      {
        const int id = index_.row_id(Block::input_lo, k, ch);
        if (!index_.rows[id].pruned) X[id] = lo[ch];
      }
      {
        const int id = index_.row_id(Block::input_hi, k, ch);
        if (!index_.rows[id].pruned) X[id] = -hi[ch];
      }
    }
  }
  return X;
}

Vec ConstraintEvaluator::lhs(const Vec& xi0, const Vec& v_hat, const Vec& gamma_full) const {
  return build_lhs(stacked_, index_, xi0, v_hat, gamma_full);
}

Vec ConstraintEvaluator::objective_term(const ParameterTrajectory& theta) const {
  const int N = index_.N, n_xi = index_.n_xi;
  Vec term = stack_bias(model_, theta);
  for (int k = 1; k <= N; ++k) {
    term.segment((k - 1) * n_xi, n_xi) -= spec_.xi_req(theta.at(k), k);
  }
  return term;
}

Vec build_offset(const SpecBundle& spec, const LinearModel& model,
                 const ParameterTrajectory& theta, const ConstraintIndexMap& index) {
  StackedSystem s = stack_dynamics(model, index.N);
  return ConstraintEvaluator(model, spec, std::move(s), index).offset(theta);
}

Vec build_lhs(const StackedSystem& stacked, const ConstraintIndexMap& index,
              const Vec& xi0, const Vec& v_hat, const Vec& gamma_full) {
  const int N = index.N, n_xi = index.n_xi, n_v = index.n_v;
  require(xi0.size() == n_xi, "build_lhs: xi0 dimension mismatch");
  require(v_hat.size() == N * n_v, "build_lhs: v_hat dimension mismatch");
  require(gamma_full.size() == N * n_xi, "build_lhs: gamma dimension mismatch");

  const Vec p = stacked.A_hat * xi0 + stacked.B_hat * v_hat;
  Vec y(index.n_rows());
  y.segment(0, N * n_xi) = p;
  y.segment(N * n_xi, N * n_xi) = -p;
  y.segment(2 * N * n_xi, N * n_v) = v_hat;
  y.segment(2 * N * n_xi + N * n_v, N * n_v) = -v_hat;
  const int soft0 = 2 * N * (n_xi + n_v);
  for (int i = 0; i < N * n_xi; ++i) {
    const int sign = index.rows[soft0 + i].soft_sign;
    y[soft0 + i] = gamma_full[i] - sign * p[i];
  }
  return y;
}

}  // namespace ccmpc
