// SPDX-License-Identifier: MIT
#include <cmath>
#include <random>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/distributions.hpp"
#include "ccmpc/risk_model.hpp"
#include "ccmpc/scenario.hpp"
#include "ccmpc/validation.hpp"
#include "doctest.h"

using namespace ccmpc;

namespace {

/// Scalar system whose single state_hi row offset equals theta and whose input
/// rows are theta-free.
struct TinyInstance {
  LinearModel model;
  SpecBundle spec;
  ConstraintIndexMap index;

  TinyInstance() {
    model.A = Mat::Zero(1, 1);
    model.B = Mat::Ones(1, 1);
    model.bias = [](const Vec& th) { return th; };
    model.bias_theta_dependent = true;
    spec.n_xi = 1;
    spec.n_v = 1;
    spec.xi_req = [](const Vec&, int) { return Vec::Zero(1); };
    spec.xi_lo = [](const Vec&, int) { return Vec::Constant(1, -kInf); };
    spec.xi_hi = [](const Vec&, int) { return Vec::Zero(1); };
    spec.v_lo = [](const Vec&, int) { return Vec::Constant(1, -1.0); };
    spec.v_hi = [](const Vec&, int) { return Vec::Constant(1, kInf); };
    spec.soft_bound = [](const Vec&, int) { return Vec::Constant(1, kInf); };
    spec.soft_kind = {SoftKind::none};
    spec.dep_req = {false};
    spec.dep_xi_lo = {false};
    spec.dep_xi_hi = {false};
    spec.dep_v_lo = {false};
    spec.dep_v_hi = {false};
    spec.dep_soft = {false};
    index = build_index_map(spec, model, 1, Vec::Zero(1));
  }

  ConstraintEvaluator eval() const {
    return ConstraintEvaluator(model, spec, stack_dynamics(model, 1), index);
  }
};

}  // namespace

TEST_CASE("sample moments per canonical row") {
  TinyInstance tiny;
  const ConstraintEvaluator eval = tiny.eval();
  const int sh = tiny.index.row_id(Block::state_hi, 1, 0);
  const int il = tiny.index.row_id(Block::input_lo, 0, 0);
  REQUIRE(tiny.index.rows[sh].theta_dep);
  REQUIRE(!tiny.index.rows[il].theta_dep);

  ScenarioSet scen;
  scen.resize(4, 1, 1);
  const double th[4] = {1.0, 2.0, 3.0, 4.0};
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k <= 1; ++k) scen.set(s, k, Vec::Constant(1, th[s]));

  const MomentSummary mom = estimate_moments(scen, eval);
  CHECK(mom.sample_count == 4);
  CHECK(mom.mean(sh) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(mom.var(sh) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(mom.mean(il) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mom.var(il) == 0.0);  // theta-free rows: exactly zero
}

TEST_CASE("tightening rules at closed-form points") {
  CHECK(psi(MvRow{0.0, 1.0}, 0.75) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
  CHECK(psi(MvRow{2.0, 4.0}, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(psi(BdRow{0.2, -1.0, 3.0}, std::exp(-0.5)) == doctest::Approx(2.2).epsilon(1e-14));
  CHECK(psi(CdfRow{GaussianLaw{1.5, 2.0}}, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(psi(CdfRow{UniformLaw{-1.0, 3.0}}, 0.25) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(delta_conv(MvRow{0.0, 1.0}) == 0.75);
  CHECK(delta_conv(BdRow{0.0, -1.0, 1.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(delta_conv(CdfRow{GaussianLaw{0.0, 1.0}}) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(psi(MvRow{0.0, 1.0}, 0.0), std::domain_error);
  CHECK_THROWS_AS(psi(MvRow{0.0, 1.0}, 1.0), std::domain_error);
}

TEST_CASE("tightening curvature and derivative consistency") {
  const auto results = run_convexity_suite();
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("coverage of the tightenings under sampling") {
  const auto results = run_inequality_suite(23);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("flat allocation and its floor") {
  const Vec d = uniform_allocation(RiskBudget{0.012, 1e-9}, 40);
  REQUIRE(d.size() == 40);
  CHECK(d(0) == doctest::Approx(3e-4).epsilon(1e-15));
  CHECK(d.sum() == doctest::Approx(0.012).epsilon(1e-14));
  CHECK_THROWS_AS(uniform_allocation(RiskBudget{1e-8, 1e-9}, 100), ConfigError);
}

TEST_CASE("empirical violation counts exceedances of the committed plan") {
  TinyInstance tiny;
  const ConstraintEvaluator eval = tiny.eval();
  const int sh = tiny.index.row_id(Block::state_hi, 1, 0);

  const int S = 20000;
  ScenarioSet scen;
  scen.resize(S, 1, 1);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.5, 1.3);
  for (int s = 0; s < S; ++s) {
    const double t0 = gauss(rng);
    for (int k = 0; k <= 1; ++k) scen.set(s, k, Vec::Constant(1, t0));
  }

  Vec y = Vec::Constant(tiny.index.n_rows(), 1e30);
  y(sh) = 0.5 + 1.3 * normal_quantile(0.9);  // exceeded with probability 0.1

  ViolationGroups groups;
  groups.names = {"only"};
  groups.rows = {{sh}};
  const ViolationReport rep = empirical_violation(y, scen, eval, groups);
  CHECK(rep.sample_count == S);
  const double margin = 3.0 * std::sqrt(0.1 * 0.9 / S);
  CHECK(std::abs(rep.per_group(0) - 0.1) <= margin);
  CHECK(rep.joint == rep.per_group(0));
}

TEST_CASE("standard normal quantile at reference points") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_cdf(normal_quantile(0.123)) == doctest::Approx(0.123).epsilon(1e-12));
}

TEST_CASE("seed mixing separates streams and is order-free") {
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(7, 0) != mix_seed(7, 1));
  CHECK(mix_seed(7, 5) == mix_seed(7, 5));
}
