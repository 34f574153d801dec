// SPDX-License-Identifier: MIT
#include <vector>

#include "ccmpc/kernels.hpp"
#include "ccmpc/powertrain.hpp"
#include "ccmpc/risk_model.hpp"
#include "doctest.h"

using namespace ccmpc;

namespace {

struct KernelFixture {
  PowertrainConfig cfg;
  ExlinModel plant;
  SpecBundle spec;
  ConstraintIndexMap index;
  ScenarioSet scen;

  KernelFixture() {
    cfg.horizon = 8;
    cfg.samples = 512;
    plant = build_powertrain_model(cfg);
    spec = transform_spec(plant, build_physical_spec(cfg), cfg.x0);
    Vec probe(1);
    probe << cfg.v_req0;
    index = build_index_map(spec, plant.core, cfg.horizon, probe);
    assign_row_families(index);
    scen = sample_speed_scenarios(build_speed_model(cfg), cfg, 0);
  }

  ConstraintEvaluator eval() const {
    return ConstraintEvaluator(plant.core, spec, stack_dynamics(plant.core, cfg.horizon), index);
  }
};

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  const KernelFixture f;
  const ConstraintEvaluator eval = f.eval();

  const Mat off_s = scenario_offset_matrix_serial(f.scen, eval);
  const Mat off_p = scenario_offset_matrix(f.scen, eval);
  REQUIRE(off_s.rows() == f.scen.S);
  REQUIRE(off_s.cols() == static_cast<long>(f.index.active.size()));
  CHECK((off_s - off_p).cwiseAbs().maxCoeff() == 0.0);

  const Mat obj_s = scenario_objective_terms_serial(f.scen, eval);
  const Mat obj_p = scenario_objective_terms(f.scen, eval);
  CHECK((obj_s - obj_p).cwiseAbs().maxCoeff() == 0.0);

  Vec mean_s, var_s, mean_p, var_p;
  column_moments_serial(off_s, mean_s, var_s);
  column_moments(off_s, mean_p, var_p);
  CHECK((mean_s - mean_p).cwiseAbs().maxCoeff() == 0.0);
  CHECK((var_s - var_p).cwiseAbs().maxCoeff() == 0.0);

  const Vec y = eval.lhs(f.plant.phi_apply(f.cfg.x0), Vec::Zero(f.cfg.horizon * 3),
                         Vec::Ones(f.cfg.horizon * 3));
  const ViolationGroups groups = chance_row_groups(f.index);
  const auto cnt_s = violation_counts_serial(y, f.scen, eval, groups.rows);
  const auto cnt_p = violation_counts(y, f.scen, eval, groups.rows);
  CHECK(cnt_s == cnt_p);
}

TEST_CASE("column moments against a direct two-pass computation") {
  const KernelFixture f;
  const Mat samples = scenario_offset_matrix_serial(f.scen, f.eval());
  Vec mean, var;
  column_moments(samples, mean, var);
  const Vec mean_ref = samples.colwise().mean().transpose();
  const Mat centered = samples.rowwise() - mean_ref.transpose();
  const Vec var_ref = centered.array().square().colwise().sum().transpose() / (samples.rows() - 1);
  CHECK((mean - mean_ref).cwiseAbs().maxCoeff() <=
        1e-13 * (1.0 + mean_ref.cwiseAbs().maxCoeff()));
  CHECK((var - var_ref).cwiseAbs().maxCoeff() <=
        1e-13 * (1.0 + var_ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("violation counts against a direct loop") {
  const KernelFixture f;
  const ConstraintEvaluator eval = f.eval();
  const Vec y = eval.lhs(f.plant.phi_apply(f.cfg.x0), Vec::Zero(f.cfg.horizon * 3),
                         Vec::Ones(f.cfg.horizon * 3));
  const ViolationGroups groups = chance_row_groups(f.index);
  const auto counts = violation_counts(y, f.scen, eval, groups.rows);
  REQUIRE(counts.size() == groups.rows.size() + 1);

  std::vector<long> ref(groups.rows.size() + 1, 0);
  for (int s = 0; s < f.scen.S; ++s) {
    const Vec X = eval.offset(f.scen.traj(s));
    bool any = false;
    for (std::size_t g = 0; g < groups.rows.size(); ++g) {
      bool hit = false;
      for (int id : groups.rows[g]) hit = hit || X(id) > y(id);
      ref[g] += hit ? 1 : 0;
      any = any || hit;
    }
    ref.back() += any ? 1 : 0;
  }
  CHECK(counts == ref);
}

TEST_CASE("moment estimation consistent with the offset kernel") {
  const KernelFixture f;
  const ConstraintEvaluator eval = f.eval();
  const MomentSummary mom = estimate_moments(f.scen, eval);
  const Mat off = scenario_offset_matrix_serial(f.scen, eval);
  Vec mean, var;
  column_moments(off, mean, var);
  for (std::size_t a = 0; a < f.index.active.size(); ++a) {
    const int id = f.index.active[a];
    CHECK(mom.mean(id) == mean(a));
    if (f.index.rows[id].theta_dep) {
      CHECK(mom.var(id) == var(a));
    } else {
      CHECK(mom.var(id) == 0.0);
    }
  }
}
