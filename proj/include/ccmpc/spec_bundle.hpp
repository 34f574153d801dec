#pragma once

#include <functional>
#include <vector>

#include "ccmpc/linear_model.hpp"

namespace ccmpc {

enum class SoftKind { none, upper, lower };

/// Constraint and tracking specification as functions of the uncertain parameter.
/// Bound evaluators receive (theta_k, k); entries may be +-inf where a bound is
/// absent. State bounds are queried at k = 1..N, input bounds at k = 0..N-1.
/// The infinity pattern of every bound must not depend on theta.
struct SpecBundle {
  int n_xi = 0;
  int n_v = 0;

  using BoundFn = std::function<Vec(const Vec& theta, int k)>;
  BoundFn xi_req;      ///< tracking reference per state channel
  BoundFn xi_lo;       ///< hard state lower bounds
  BoundFn xi_hi;       ///< hard state upper bounds
  BoundFn v_lo;        ///< input lower bounds
  BoundFn v_hi;        ///< input upper bounds
  BoundFn soft_bound;  ///< soft bound per state channel (ignored where kind == none)

  std::vector<SoftKind> soft_kind;  ///< per state channel

  // Per-channel theta-dependence flags; a bound flagged false must return the
  // same value for every theta.
  std::vector<bool> dep_req, dep_xi_lo, dep_xi_hi, dep_v_lo, dep_v_hi, dep_soft;

  void validate() const;
};

enum class Block { state_lo, state_hi, input_lo, input_hi, soft };

struct RowRef {
  Block block;
  int k;   ///< time index of the bound (state/soft: 1..N, input: 0..N-1)
  int ch;  ///< channel within the block
  bool pruned = false;     ///< infinite bound: row never binds
  bool theta_dep = false;  ///< row offset varies with theta
  int soft_sign = 1;       ///< soft rows: +1 upper bound, -1 negated (lower) bound
  int family = -1;         ///< reporting group, assigned by instance builders
};

/// Canonical row numbering of the stacked constraint description
/// X(theta_hat) <= y(v_hat, gamma_hat): five blocks in fixed order
/// (state_lo, state_hi, input_lo, input_hi, soft), time-major within a block.
struct ConstraintIndexMap {
  int N = 0, n_xi = 0, n_v = 0;
  std::vector<RowRef> rows;  ///< size n_rows(), canonical order
  std::vector<int> active;   ///< canonical ids of unpruned rows

  int n_rows() const { return static_cast<int>(rows.size()); }
  int row_id(Block b, int k, int ch) const;
  /// Position of a soft row's slack inside the full canonical gamma vector.
  int gamma_pos(int canonical_soft_row) const;
};

/// Builds the canonical numbering, prunes infinite bounds (probed at
/// probe_theta) and records per-row theta dependence.
ConstraintIndexMap build_index_map(const SpecBundle& spec, const LinearModel& model,
                                   int N, const Vec& probe_theta);

}  // namespace ccmpc
