// SPDX-License-Identifier: MIT
#include "ccmpc/risk_problem.hpp"

namespace ccmpc {

namespace {

/// Row of y(v_hat, gamma_hat) as an affine function a'z + b of the decision z.
void row_geometry(const RowRef& r, const ConstraintIndexMap& idx, const Mat& B_hat,
                  const Vec& p0, const std::vector<int>& gamma_var_of_row, int row_id,
                  Vec& a, double& b) {
  const int nz = static_cast<int>(a.size());
  const int nv_total = idx.N * idx.n_v;
  a.setZero();
  b = 0;
  switch (r.block) {
    case Block::state_lo: {
      const int rr = (r.k - 1) * idx.n_xi + r.ch;
      a.head(nv_total) = B_hat.row(rr);
      b = p0[rr];
      break;
    }
    case Block::state_hi: {
      const int rr = (r.k - 1) * idx.n_xi + r.ch;
      a.head(nv_total) = -B_hat.row(rr);
      b = -p0[rr];
      break;
    }
    case Block::input_lo:
      a[r.k * idx.n_v + r.ch] = 1.0;
      break;
    case Block::input_hi:
      a[r.k * idx.n_v + r.ch] = -1.0;
      break;
    case Block::soft: {
      const int rr = (r.k - 1) * idx.n_xi + r.ch;
      const double s = static_cast<double>(r.soft_sign);
      a.head(nv_total) = -s * B_hat.row(rr);
      const int gv = gamma_var_of_row[row_id];
      require(gv >= 0, "row_geometry: soft row without slack variable");
      require(nv_total + gv < nz, "row_geometry: slack index out of range");
      a[nv_total + gv] = 1.0;
      b = -s * p0[rr];
      break;
    }
  }
}

RiskProblem assemble_common(const ConstraintEvaluator& eval, const Weights& w,
                            const Vec& xi0, const Vec& obj_term_mean,
                            std::vector<int>& gamma_var_of_row, Vec& p0) {
  const ConstraintIndexMap& idx = eval.index();
  const StackedSystem& sys = eval.sys();
  require(static_cast<int>(xi0.size()) == sys.n_xi, "assemble: xi0 has wrong size");
  QuadObjective qo = build_objective(sys, idx, w, xi0, obj_term_mean);

  RiskProblem P;
  P.H = std::move(qo.H);
  P.g = std::move(qo.g);
  P.N = idx.N;
  P.n_v = idx.n_v;
  P.n_xi = idx.n_xi;
  P.gamma_rows = std::move(qo.gamma_rows);
  P.w_delta = w.w_delta;

  gamma_var_of_row.assign(idx.n_rows(), -1);
  for (int gi = 0; gi < P.n_gamma(); ++gi) gamma_var_of_row[P.gamma_rows[gi]] = gi;
  p0 = sys.A_hat * xi0;
  return P;
}

}  // namespace

RiskProblem assemble(const ConstraintEvaluator& eval, const MomentSummary& moments,
                     const Weights& w, const Vec& xi0, const RiskBudget& budget,
                     DistributionMode mode, const RowDistFactory& factory) {
  const ConstraintIndexMap& idx = eval.index();
  require(moments.mean.size() == idx.n_rows() && moments.var.size() == idx.n_rows(),
          "assemble: moment summary does not match the row layout");
  std::vector<int> gamma_var_of_row;
  Vec p0;
  RiskProblem P = assemble_common(eval, w, xi0, moments.obj_term_mean, gamma_var_of_row, p0);
  P.budget = budget;

  for (int id : idx.active) {
    const RowRef& r = idx.rows[id];
    Vec a(P.nz());
    double b = 0;
    row_geometry(r, idx, eval.sys().B_hat, p0, gamma_var_of_row, id, a, b);
    if (r.theta_dep) {
      RowDist dist;
      if (factory) {
        dist = factory(id, moments);
      } else {
        require(mode == DistributionMode::mv,
                "assemble: bounded/exact-law rows need a distribution factory");
        dist = MvRow{moments.mean[id], moments.var[id]};
      }
      P.chance.push_back({id, std::move(dist), std::move(a), b, r.block, r.k, r.ch, r.family});
    } else {
      P.det.push_back({id, moments.mean[id], std::move(a), b, r.block, r.k, r.ch});
    }
  }

  if (!P.chance.empty()) {
    require(budget.delta_bar > 0 && budget.delta_bar < 1,
            "assemble: risk budget must lie in (0,1)");
    require(budget.epsilon_floor > 0 &&
                budget.epsilon_floor * P.nc() < budget.delta_bar,
            "assemble: risk floor leaves no room under the budget");
    P.min_delta_conv = kInf;
    for (const ChanceRowSpec& row : P.chance) {
      P.min_delta_conv = std::min(P.min_delta_conv, delta_conv(row.dist));
    }
    P.convexity_certified = budget.delta_bar <= P.min_delta_conv * (1 + 1e-12);
  }
  return P;
}

RiskProblem assemble_deterministic(const ConstraintEvaluator& eval, const Weights& w,
                                   const Vec& xi0, const ParameterTrajectory& traj) {
  const ConstraintIndexMap& idx = eval.index();
  const Vec X = eval.offset(traj);
  std::vector<int> gamma_var_of_row;
  Vec p0;
  RiskProblem P =
      assemble_common(eval, w, xi0, eval.objective_term(traj), gamma_var_of_row, p0);
  for (int id : idx.active) {
    const RowRef& r = idx.rows[id];
    Vec a(P.nz());
    double b = 0;
    row_geometry(r, idx, eval.sys().B_hat, p0, gamma_var_of_row, id, a, b);
    P.det.push_back({id, X[id], std::move(a), b, r.block, r.k, r.ch});
  }
  return P;
}

}  // namespace ccmpc
