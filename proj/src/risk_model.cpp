#include "ccmpc/risk_model.hpp"

#include <cmath>

#include "ccmpc/kernels.hpp"

namespace ccmpc {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("psi: delta outside (0,1)");
}

}  // namespace

double psi(const RowDist& row, double delta) {
  check_delta(delta);
  return std::visit(
      [delta](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MvRow>) {
          require(r.var >= 0, "psi: negative variance");
          return r.mean + std::sqrt(r.var * (1.0 - delta) / delta);
        } else if constexpr (std::is_same_v<T, BdRow>) {
          require(r.hi >= r.lo, "psi: invalid support");
          return r.mean + (r.hi - r.lo) / std::sqrt(2.0) * std::sqrt(-std::log(delta));
        } else {
          return law_quantile(r.law, 1.0 - delta);
        }
      },
      row);
}

PsiDerivs psi_derivatives(const RowDist& row, double delta) {
  check_delta(delta);
  return std::visit(
      [delta](const auto& r) -> PsiDerivs {
        using T = std::decay_t<decltype(r)>;
        PsiDerivs d;
        if constexpr (std::is_same_v<T, MvRow>) {
          const double sv = std::sqrt(r.var);
          const double phi = std::sqrt((1.0 - delta) / delta);
          d.value = r.mean + sv * phi;
          if (sv == 0.0) return d;  // constant row
          d.d1 = sv * (-1.0 / (2.0 * delta * delta * phi));
          d.d2 = sv * ((3.0 - 4.0 * delta) / (4.0 * std::pow(delta, 4) * phi * phi * phi));
        } else if constexpr (std::is_same_v<T, BdRow>) {
          const double w = (r.hi - r.lo) / std::sqrt(2.0);
          const double h = std::sqrt(-std::log(delta));
          d.value = r.mean + w * h;
          if (w == 0.0) return d;
          d.d1 = w * (-1.0 / (2.0 * delta * h));
          d.d2 = w * (-(1.0 + 2.0 * std::log(delta)) / (4.0 * delta * delta * h * h * h));
        } else {
          d.value = law_quantile(r.law, 1.0 - delta);
          const double f = law_pdf(r.law, d.value);
          require(f > 0, "psi_derivatives: zero density at quantile");
          d.d1 = -1.0 / f;
          d.d2 = -law_pdf_deriv(r.law, d.value) / (f * f * f);
        }
        return d;
      },
      row);
}

double delta_conv(const RowDist& row) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MvRow>) {
          return 0.75;
        } else if constexpr (std::is_same_v<T, BdRow>) {
          return std::exp(-0.5);
        } else {
          return 1.0 - law_cdf(r.law, law_xstar(r.law));
        }
      },
      row);
}

Vec uniform_allocation(const RiskBudget& budget, int n_c) {
  require(n_c >= 1, "uniform_allocation: no risk-bearing rows");
  require(budget.delta_bar > 0 && budget.delta_bar < 1, "uniform_allocation: delta_bar outside (0,1)");
  const double each = budget.delta_bar / n_c;
  require(each > budget.epsilon_floor, "uniform_allocation: delta_bar / n_c at or below epsilon floor");
  return Vec::Constant(n_c, each);
}

MomentSummary estimate_moments(const ScenarioSet& scen, const ConstraintEvaluator& eval) {
  require(scen.S >= 2, "estimate_moments: need at least two samples");
  require(scen.N == eval.index().N, "estimate_moments: horizon mismatch");

  const Mat X = scenario_offset_matrix(scen, eval);       // S x n_active
  const Mat T = scenario_objective_terms(scen, eval);     // S x N*n_xi

  MomentSummary m;
  m.sample_count = scen.S;
  const int n_rows = eval.index().n_rows();
  m.mean = Vec::Zero(n_rows);
  m.var = Vec::Zero(n_rows);

  Vec mu, var;
  column_moments(X, mu, var);
  const auto& active = eval.index().active;
  for (size_t i = 0; i < active.size(); ++i) {
    const int id = active[i];
    m.mean[id] = mu[static_cast<int>(i)];
    // Rows that do not depend on theta carry exactly zero variance.
    m.var[id] = eval.index().rows[id].theta_dep ? var[static_cast<int>(i)] : 0.0;
  }

  Vec tvar;
  column_moments(T, m.obj_term_mean, tvar);
  return m;
}

ViolationReport empirical_violation(const Vec& y, const ScenarioSet& scen,
                                    const ConstraintEvaluator& eval,
                                    const ViolationGroups& groups) {
  require(y.size() == eval.index().n_rows(), "empirical_violation: y dimension mismatch");
  require(groups.names.size() == groups.rows.size(), "empirical_violation: group naming mismatch");

  const std::vector<long> counts = violation_counts(y, scen, eval, groups.rows);
  ViolationReport rep;
  rep.sample_count = scen.S;
  rep.per_group = Vec::Zero(static_cast<int>(groups.rows.size()));
  for (size_t g = 0; g < groups.rows.size(); ++g) {
    rep.per_group[static_cast<int>(g)] = static_cast<double>(counts[g]) / scen.S;
  }
  rep.joint = static_cast<double>(counts.back()) / scen.S;
  return rep;
}

}  // namespace ccmpc
