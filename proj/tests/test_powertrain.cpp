// SPDX-License-Identifier: MIT
#include <cmath>

#include "ccmpc/powertrain.hpp"
#include "ccmpc/risk_problem.hpp"
#include "doctest.h"

using namespace ccmpc;

TEST_CASE("requested-speed process: pinned steps and deterministic limit") {
  PowertrainConfig cfg;
  cfg.accel_std = 0.0;
  const SpeedScenarioModel m = build_speed_model(cfg);
  CHECK(m.true_profile[0] == 60.0);
  CHECK(m.true_profile[1] == doctest::Approx(60.25).epsilon(1e-15));
  CHECK(m.prior_mean(0, 1) == doctest::Approx(60.25).epsilon(1e-15));
  CHECK(m.prior_mean(0, 2) == doctest::Approx(60.5).epsilon(1e-14));
  CHECK(m.prior_std(0, 1) == 0.0);
  CHECK(m.prior_std(0, 2) == 0.0);

  cfg.samples = 4;
  const ScenarioSet scen = sample_speed_scenarios(m, cfg, 0);
  for (int s = 0; s < scen.S; ++s)
    for (int k = 0; k <= cfg.horizon; ++k)
      CHECK(scen.at(s, k)(0) == m.true_profile[k]);
}

TEST_CASE("request uncertainty grows with the square root of lookahead") {
  PowertrainConfig cfg;
  const SpeedScenarioModel m = build_speed_model(cfg);
  CHECK(m.prior_std(3, 0) == 0.0);
  CHECK(m.prior_std(3, 1) == 0.0);  // the next request is already known
  CHECK(m.prior_std(3, 5) == doctest::Approx(0.1 * 0.15 * 2.0).epsilon(1e-14));
  CHECK(m.prior_mean(3, 1) == m.true_profile[4]);
}

TEST_CASE("canonical row census of the case study") {
  PowertrainConfig cfg;
  cfg.samples = 64;
  const ExlinModel plant = build_powertrain_model(cfg);
  const SpecBundle spec = transform_spec(plant, build_physical_spec(cfg), cfg.x0);
  Vec probe(1);
  probe << cfg.v_req0;
  ConstraintIndexMap index = build_index_map(spec, plant.core, cfg.horizon, probe);
  assign_row_families(index);

  CHECK(index.n_rows() == 150);
  CHECK(static_cast<int>(index.active.size()) == 90);

  int n_chance = 0, fam_counts[kNumFamilies] = {0, 0, 0};
  for (int id : index.active) {
    if (index.rows[id].theta_dep) {
      ++n_chance;
      REQUIRE(index.rows[id].family >= 0);
      ++fam_counts[index.rows[id].family];
    }
  }
  CHECK(n_chance == 40);
  CHECK(fam_counts[kFamEngine] == 10);
  CHECK(fam_counts[kFamMotorPower] == 20);
  CHECK(fam_counts[kFamSocSoft] == 10);

  const ViolationGroups groups = chance_row_groups(index);
  REQUIRE(groups.names.size() == 3);
  CHECK(groups.names[kFamEngine] == kFamilyNames[kFamEngine]);
  CHECK(groups.rows[kFamEngine].size() == 10);
  CHECK(groups.rows[kFamMotorPower].size() == 20);
  CHECK(groups.rows[kFamSocSoft].size() == 10);

  const ConstraintEvaluator eval(plant.core, spec, stack_dynamics(plant.core, cfg.horizon),
                                 index);
  const ScenarioSet scen = sample_speed_scenarios(build_speed_model(cfg), cfg, 0);
  const MomentSummary mom = estimate_moments(scen, eval);
  Weights w;
  w.w_req = (Vec(3) << 0.0, cfg.w_speed, 0.0).finished();
  w.w_v = (Vec(3) << cfg.w_eng, cfg.w_mot, cfg.w_brk).finished();
  w.w_soft = (Vec(3) << 0.0, 0.0, cfg.w_soc).finished();
  w.w_delta = cfg.w_delta;
  const RiskProblem P = assemble(eval, mom, w, plant.phi_apply(cfg.x0),
                                 RiskBudget{cfg.delta_bar, cfg.eps_floor}, cfg.mode);
  CHECK(P.nc() == 40);
  CHECK(static_cast<int>(P.det.size()) == 50);
  CHECK(P.n_gamma() == 10);
  CHECK(P.convexity_certified);
}

TEST_CASE("closed loop: feasible, budget-tight, paired, and consistent") {
  PowertrainConfig cfg;
  cfg.run_steps = 6;
  cfg.samples = 256;
  RunOptions opt;
  opt.paired_uniform = true;
  const MPCLog log = run_mpc(cfg, Variant::optimized, opt);
  REQUIRE(static_cast<int>(log.steps.size()) == 6);

  const ExlinModel plant = build_powertrain_model(cfg);
  const SpeedScenarioModel speed = build_speed_model(cfg);
  for (int t = 0; t < 6; ++t) {
    const StepRecord& r = log.steps[t];
    INFO("step " << t);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(!r.fallback);
    CHECK(std::abs(r.delta_sum - cfg.delta_bar) <= 1e-6);
    CHECK(r.lambda > 0.0);
    CHECK(r.kkt_residual <= 1e-7);
    CHECK(r.v_req_true == speed.true_profile[t]);
    CHECK(r.paired_ok);
    CHECK(r.paired_uniform_objective >=
          r.objective - 1e-8 * (1.0 + std::abs(r.objective)));
    CHECK(r.family_delta.sum() == doctest::Approx(r.delta_sum).epsilon(1e-12));
    CHECK((plant.input_apply(r.u, r.x) - r.v0).cwiseAbs().maxCoeff() <= 1e-9);
    if (t + 1 < 6) {
      Vec th(1);
      th << speed.true_profile[t];
      const Vec x_next = plant.step(r.x, r.u, th);
      CHECK((x_next - log.steps[t + 1].x).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("closed loop repeats bit for bit under the same seed") {
  PowertrainConfig cfg;
  cfg.run_steps = 4;
  cfg.samples = 128;
  const MPCLog a = run_mpc(cfg, Variant::optimized);
  const MPCLog b = run_mpc(cfg, Variant::optimized);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    CHECK((a.steps[t].x - b.steps[t].x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.steps[t].u - b.steps[t].u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.steps[t].objective == b.steps[t].objective);
    CHECK(a.steps[t].delta_sum == b.steps[t].delta_sum);
    CHECK(a.steps[t].lambda == b.steps[t].lambda);
    CHECK(a.steps[t].joint_violation == b.steps[t].joint_violation);
  }
}

TEST_CASE("controllers run on one shared realization") {
  PowertrainConfig cfg;
  cfg.run_steps = 4;
  cfg.samples = 128;
  const Comparison cmp = compare_controllers(cfg);
  REQUIRE(cmp.optimized.steps.size() == 4);
  REQUIRE(cmp.uniform.steps.size() == 4);
  REQUIRE(cmp.deterministic.steps.size() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(cmp.optimized.steps[t].v_req_true == cmp.uniform.steps[t].v_req_true);
    CHECK(cmp.optimized.steps[t].v_req_true == cmp.deterministic.steps[t].v_req_true);
    CHECK(cmp.optimized.steps[t].paired_ok);
    CHECK(std::abs(cmp.uniform.steps[t].delta_sum - cfg.delta_bar) <= 1e-12);
    CHECK(cmp.deterministic.steps[t].delta_sum == 0.0);
  }
}

TEST_CASE("without request noise the risk-aware plan matches the certain one") {
  PowertrainConfig cfg;
  cfg.run_steps = 4;
  cfg.samples = 8;
  cfg.accel_std = 0.0;
  const MPCLog opt_log = run_mpc(cfg, Variant::optimized);
  const MPCLog det_log = run_mpc(cfg, Variant::deterministic);
  for (int t = 0; t < 4; ++t) {
    INFO("step " << t);
    CHECK(opt_log.steps[t].status == SolveStatus::optimal);
    CHECK(det_log.steps[t].status == SolveStatus::optimal);
    CHECK((opt_log.steps[t].v0 - det_log.steps[t].v0).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("budget sweep on the first-step instance") {
  PowertrainConfig cfg;
  cfg.samples = 256;
  const auto points = sweep_delta_bar(cfg, {0.004, 0.012, 0.05});
  REQUIRE(points.size() == 3);
  double prev = kInf;
  for (const SweepPoint& p : points) {
    CHECK(p.status == SolveStatus::optimal);
    CHECK(std::abs(p.delta_sum - p.delta_bar) <= 1e-9);
    CHECK(p.lambda > 0.0);
    CHECK(p.objective <= prev + 1e-9 * (1.0 + std::abs(prev)));
    prev = p.objective;
  }
}
