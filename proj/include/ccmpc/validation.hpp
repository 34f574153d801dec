#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccmpc/types.hpp"

namespace ccmpc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Monte Carlo coverage of the three tightening rules on analytic laws, plus
/// the union-bound guarantee on multi-row instances.
std::vector<CheckResult> run_inequality_suite(std::uint64_t seed);

/// Analytic curvature of the tightenings on dense risk grids up to each rule's
/// certified range, with finite-difference cross-checks, and loss of convexity
/// beyond the range where the rule is sharp.
std::vector<CheckResult> run_convexity_suite();

/// Self-certifying solver checks: KKT certificates on random instances, exact
/// budget use, fixed-allocation dominance, budget monotonicity, a closed-form
/// instance, and an infeasibility certificate.
std::vector<CheckResult> run_solver_suite(std::uint64_t seed);

/// Coordinate-change checks: inversion round-trips, linear-nonlinear rollout
/// conjugacy, bound-transform consistency.
std::vector<CheckResult> run_exlin_suite(std::uint64_t seed);

/// Condensed prediction operators against stepwise simulation on random models.
std::vector<CheckResult> run_stacking_suite(std::uint64_t seed);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace ccmpc
