#include "ccmpc/objective.hpp"

namespace ccmpc {

QuadObjective build_objective(const StackedSystem& stacked, const ConstraintIndexMap& index,
                              const Weights& w, const Vec& xi0, const Vec& mean_obj_term) {
  const int N = index.N, n_xi = index.n_xi, n_v = index.n_v;
  require(w.w_req.size() == n_xi && w.w_v.size() == n_v && w.w_soft.size() == n_xi,
          "build_objective: weight dimension mismatch");
  require((w.w_req.array() >= 0).all(), "build_objective: tracking weights must be >= 0");
  require((w.w_v.array() > 0).all(), "build_objective: input weights must be > 0");
  require(w.w_delta >= 0, "build_objective: regularizer weight must be >= 0");
  require(xi0.size() == n_xi, "build_objective: xi0 dimension mismatch");
  require(mean_obj_term.size() == N * n_xi, "build_objective: coupling term dimension mismatch");

  QuadObjective q;
  const int soft0 = 2 * N * (n_xi + n_v);
  for (int i = 0; i < N * n_xi; ++i) {
    const RowRef& r = index.rows[soft0 + i];
    if (!r.pruned) {
      require(w.w_soft[r.ch] > 0, "build_objective: soft weight must be > 0 on soft channels");
      q.gamma_rows.push_back(soft0 + i);
    }
  }
  const int nv = N * n_v;
  const int ng = static_cast<int>(q.gamma_rows.size());
  const int nz = nv + ng;

  Vec wreq_stacked(N * n_xi), wv_stacked(nv);
  for (int k = 0; k < N; ++k) {
    wreq_stacked.segment(k * n_xi, n_xi) = w.w_req;
    wv_stacked.segment(k * n_v, n_v) = w.w_v;
  }

  q.H = Mat::Zero(nz, nz);
  q.H.topLeftCorner(nv, nv) =
      2.0 * (stacked.B_hat.transpose() * wreq_stacked.asDiagonal() * stacked.B_hat);
  q.H.topLeftCorner(nv, nv).diagonal() += 2.0 * wv_stacked;
  for (int i = 0; i < ng; ++i) {
    q.H(nv + i, nv + i) = 2.0 * w.w_soft[index.rows[q.gamma_rows[i]].ch];
  }

  q.g = Vec::Zero(nz);
  q.g.head(nv) = 2.0 * stacked.B_hat.transpose() *
                 (wreq_stacked.asDiagonal() * (stacked.A_hat * xi0 + mean_obj_term));
  return q;
}

}  // namespace ccmpc
