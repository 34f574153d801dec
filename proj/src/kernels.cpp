#include "ccmpc/kernels.hpp"

namespace ccmpc {

namespace {

void offset_row(const ScenarioSet& scen, const ConstraintEvaluator& eval, int s, Mat& out) {
  const Vec X = eval.offset(scen.traj(s));
  const auto& active = eval.index().active;
  for (size_t i = 0; i < active.size(); ++i) out(s, static_cast<int>(i)) = X[active[i]];
}

bool sample_violates(const Vec& X, const Vec& y, const std::vector<int>& rows) {
  for (int id : rows) {
    if (X[id] > y[id]) return true;
  }
  return false;
}

}  // namespace

Mat scenario_offset_matrix(const ScenarioSet& scen, const ConstraintEvaluator& eval) {
  Mat out(scen.S, static_cast<int>(eval.index().active.size()));
#pragma omp parallel for schedule(static)
  for (int s = 0; s < scen.S; ++s) offset_row(scen, eval, s, out);
  return out;
}

Mat scenario_offset_matrix_serial(const ScenarioSet& scen, const ConstraintEvaluator& eval) {
  Mat out(scen.S, static_cast<int>(eval.index().active.size()));
  for (int s = 0; s < scen.S; ++s) offset_row(scen, eval, s, out);
  return out;
}

Mat scenario_objective_terms(const ScenarioSet& scen, const ConstraintEvaluator& eval) {
  Mat out(scen.S, eval.index().N * eval.index().n_xi);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < scen.S; ++s) out.row(s) = eval.objective_term(scen.traj(s)).transpose();
  return out;
}

Mat scenario_objective_terms_serial(const ScenarioSet& scen, const ConstraintEvaluator& eval) {
  Mat out(scen.S, eval.index().N * eval.index().n_xi);
  for (int s = 0; s < scen.S; ++s) out.row(s) = eval.objective_term(scen.traj(s)).transpose();
  return out;
}

namespace {

void column_moment(const Mat& samples, int j, Vec& mean, Vec& var) {
  const int S = static_cast<int>(samples.rows());
  double acc = 0.0;
  for (int s = 0; s < S; ++s) acc += samples(s, j);
  const double mu = acc / S;
  double sq = 0.0;
  for (int s = 0; s < S; ++s) {
    const double d = samples(s, j) - mu;
    sq += d * d;
  }
  mean[j] = mu;
  var[j] = S > 1 ? sq / (S - 1) : 0.0;
}

}  // namespace

void column_moments(const Mat& samples, Vec& mean, Vec& var) {
  const int n = static_cast<int>(samples.cols());
  mean.resize(n);
  var.resize(n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) column_moment(samples, j, mean, var);
}

void column_moments_serial(const Mat& samples, Vec& mean, Vec& var) {
  const int n = static_cast<int>(samples.cols());
  mean.resize(n);
  var.resize(n);
  for (int j = 0; j < n; ++j) column_moment(samples, j, mean, var);
}

std::vector<long> violation_counts(const Vec& y, const ScenarioSet& scen,
                                   const ConstraintEvaluator& eval,
                                   const std::vector<std::vector<int>>& groups) {
  const int G = static_cast<int>(groups.size());
  std::vector<long> counts(G + 1, 0);
#pragma omp parallel
  {
    std::vector<long> local(G + 1, 0);
#pragma omp for schedule(static) nowait
    for (int s = 0; s < scen.S; ++s) {
      const Vec X = eval.offset(scen.traj(s));
      bool any = false;
      for (int g = 0; g < G; ++g) {
        if (sample_violates(X, y, groups[g])) {
          ++local[g];
          any = true;
        }
      }
      if (any) ++local[G];
    }
#pragma omp critical
    for (int g = 0; g <= G; ++g) counts[g] += local[g];
  }
  return counts;
}

std::vector<long> violation_counts_serial(const Vec& y, const ScenarioSet& scen,
                                          const ConstraintEvaluator& eval,
                                          const std::vector<std::vector<int>>& groups) {
  const int G = static_cast<int>(groups.size());
  std::vector<long> counts(G + 1, 0);
  for (int s = 0; s < scen.S; ++s) {
    const Vec X = eval.offset(scen.traj(s));
    bool any = false;
    for (int g = 0; g < G; ++g) {
      if (sample_violates(X, y, groups[g])) {
        ++counts[g];
        any = true;
      }
    }
    if (any) ++counts[G];
  }
  return counts;
}

}  // namespace ccmpc
