#pragma once

#include <vector>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/scenario.hpp"

namespace ccmpc {

// Scenario-parallel kernels. The parallel versions partition work so that
// every floating-point accumulation happens in the same order as the serial
// reference (per-sample work is independent; per-column reductions run in
// sample order), hence results are bit-identical for any thread count.
// The *_serial twins are the reference implementations used by the tests and
// the benchmark.

/// X(theta_hat^{(s)}) over the unpruned rows; returns S x n_active.
Mat scenario_offset_matrix(const ScenarioSet& scen, const ConstraintEvaluator& eval);
Mat scenario_offset_matrix_serial(const ScenarioSet& scen, const ConstraintEvaluator& eval);

/// Objective coupling term c_hat - xi_req per scenario; returns S x (N*n_xi).
Mat scenario_objective_terms(const ScenarioSet& scen, const ConstraintEvaluator& eval);
Mat scenario_objective_terms_serial(const ScenarioSet& scen, const ConstraintEvaluator& eval);

/// Column-wise sample mean and unbiased variance, accumulated in sample order.
void column_moments(const Mat& samples, Vec& mean, Vec& var);
void column_moments_serial(const Mat& samples, Vec& mean, Vec& var);

/// Per-group counts of samples with X_j > y_j for at least one group row;
/// the returned vector carries one count per group plus the union count.
std::vector<long> violation_counts(const Vec& y, const ScenarioSet& scen,
                                   const ConstraintEvaluator& eval,
                                   const std::vector<std::vector<int>>& groups);
std::vector<long> violation_counts_serial(const Vec& y, const ScenarioSet& scen,
                                          const ConstraintEvaluator& eval,
                                          const std::vector<std::vector<int>>& groups);

}  // namespace ccmpc
