#include "ccmpc/spec_bundle.hpp"

#include <cmath>

namespace ccmpc {

void SpecBundle::validate() const {
  require(n_xi > 0 && n_v > 0, "SpecBundle: dimensions must be positive");
  require(static_cast<bool>(xi_req) && static_cast<bool>(xi_lo) && static_cast<bool>(xi_hi) &&
              static_cast<bool>(v_lo) && static_cast<bool>(v_hi) && static_cast<bool>(soft_bound),
          "SpecBundle: all bound evaluators must be set");
  require(static_cast<int>(soft_kind.size()) == n_xi, "SpecBundle: soft_kind size mismatch");
  auto chk = [&](const std::vector<bool>& f, int n, const char* what) {
    require(static_cast<int>(f.size()) == n, std::string("SpecBundle: flag size mismatch: ") + what);
  };
  chk(dep_req, n_xi, "dep_req");
  chk(dep_xi_lo, n_xi, "dep_xi_lo");
  chk(dep_xi_hi, n_xi, "dep_xi_hi");
  chk(dep_v_lo, n_v, "dep_v_lo");
  chk(dep_v_hi, n_v, "dep_v_hi");
  chk(dep_soft, n_xi, "dep_soft");
}

int ConstraintIndexMap::row_id(Block b, int k, int ch) const {
  switch (b) {
    case Block::state_lo:
      return (k - 1) * n_xi + ch;
    case Block::state_hi:
      return N * n_xi + (k - 1) * n_xi + ch;
    case Block::input_lo:
      return 2 * N * n_xi + k * n_v + ch;
    case Block::input_hi:
      return 2 * N * n_xi + N * n_v + k * n_v + ch;
    case Block::soft:
      return 2 * N * (n_xi + n_v) + (k - 1) * n_xi + ch;
  }
  return -1;
}

int ConstraintIndexMap::gamma_pos(int canonical_soft_row) const {
  const RowRef& r = rows.at(canonical_soft_row);
  require(r.block == Block::soft, "gamma_pos: not a soft row");
  return (r.k - 1) * n_xi + r.ch;
}

ConstraintIndexMap build_index_map(const SpecBundle& spec, const LinearModel& model,
                                   int N, const Vec& probe_theta) {
  spec.validate();
  model.validate();
  require(model.n_xi() == spec.n_xi && model.n_v() == spec.n_v,
          "build_index_map: model/spec dimension mismatch");
  require(N >= 1, "build_index_map: horizon must be >= 1");

  ConstraintIndexMap m;
  m.N = N;
  m.n_xi = spec.n_xi;
  m.n_v = spec.n_v;
  m.rows.resize(2 * N * (spec.n_xi + spec.n_v) + N * spec.n_xi);

  const bool bias_dep = model.bias_theta_dependent;
  auto put = [&](Block b, int k, int ch, bool pruned, bool dep, int sign) {
    RowRef r;
    r.block = b;
    r.k = k;
    r.ch = ch;
    r.pruned = pruned;
    r.theta_dep = !pruned && dep;
    r.soft_sign = sign;
    m.rows[m.row_id(b, k, ch)] = r;
  };

  for (int k = 1; k <= N; ++k) {
    const Vec lo = spec.xi_lo(probe_theta, k);
    const Vec hi = spec.xi_hi(probe_theta, k);
    const Vec sb = spec.soft_bound(probe_theta, k);
    require(lo.size() == spec.n_xi && hi.size() == spec.n_xi && sb.size() == spec.n_xi,
            "build_index_map: state bound dimension mismatch");
    for (int ch = 0; ch < spec.n_xi; ++ch) {
      put(Block::state_lo, k, ch, std::isinf(lo[ch]), spec.dep_xi_lo[ch] || bias_dep, 1);
      put(Block::state_hi, k, ch, std::isinf(hi[ch]), spec.dep_xi_hi[ch] || bias_dep, 1);
      const bool soft_off = spec.soft_kind[ch] == SoftKind::none || std::isinf(sb[ch]);
      put(Block::soft, k, ch, soft_off, spec.dep_soft[ch] || bias_dep,
          spec.soft_kind[ch] == SoftKind::lower ? -1 : 1);
    }
  }
  for (int k = 0; k < N; ++k) {
    const Vec lo = spec.v_lo(probe_theta, k);
    const Vec hi = spec.v_hi(probe_theta, k);
    require(lo.size() == spec.n_v && hi.size() == spec.n_v,
            "build_index_map: input bound dimension mismatch");
    for (int ch = 0; ch < spec.n_v; ++ch) {
      put(Block::input_lo, k, ch, std::isinf(lo[ch]), spec.dep_v_lo[ch], 1);
      put(Block::input_hi, k, ch, std::isinf(hi[ch]), spec.dep_v_hi[ch], 1);
    }
  }

  for (int j = 0; j < m.n_rows(); ++j) {
    if (!m.rows[j].pruned) m.active.push_back(j);
  }
  return m;
}

}  // namespace ccmpc
