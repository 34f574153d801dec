// SPDX-License-Identifier: MIT
// Times the scenario kernels against their serial reference implementations on
// one large instance and verifies bit-identical results.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "ccmpc/kernels.hpp"
#include "ccmpc/powertrain.hpp"
#include "ccmpc/risk_model.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double best_ms(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    body();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool exact) {
  std::printf("%-26s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, exact ? "exact match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-kernel benchmark: serial reference vs parallel"};
  int samples = 1 << 16, horizon = 40, reps = 3;
  app.add_option("--samples", samples, "Scenario count")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "Prediction horizon")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions per kernel (best time kept)")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  ccmpc::PowertrainConfig cfg;
  cfg.horizon = horizon;
  cfg.samples = samples;
  cfg.validate();

  const ccmpc::ExlinModel plant = ccmpc::build_powertrain_model(cfg);
  const ccmpc::SpecBundle phys = ccmpc::build_physical_spec(cfg);
  const ccmpc::SpecBundle spec = ccmpc::transform_spec(plant, phys, cfg.x0);
  ccmpc::Vec probe(1);
  probe << cfg.v_req0;
  ccmpc::ConstraintIndexMap index =
      ccmpc::build_index_map(spec, plant.core, cfg.horizon, probe);
  ccmpc::assign_row_families(index);
  const ccmpc::ConstraintEvaluator eval(plant.core, spec,
                                        ccmpc::stack_dynamics(plant.core, cfg.horizon), index);

  const ccmpc::SpeedScenarioModel sm = ccmpc::build_speed_model(cfg);
  const ccmpc::ScenarioSet scen = ccmpc::sample_speed_scenarios(sm, cfg, 0);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("samples %d, horizon %d, active rows %d, threads %d\n", scen.S, cfg.horizon,
              static_cast<int>(index.active.size()), threads);
  std::printf("%-26s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  ccmpc::Mat off_s, off_p;
  {
    const double s_ms = best_ms(reps, [&] { off_s = ccmpc::scenario_offset_matrix_serial(scen, eval); });
    const double p_ms = best_ms(reps, [&] { off_p = ccmpc::scenario_offset_matrix(scen, eval); });
    const bool exact =
        off_s.rows() == off_p.rows() && (off_s - off_p).cwiseAbs().maxCoeff() == 0.0;
    report("scenario_offset_matrix", s_ms, p_ms, exact);
  }
  {
    ccmpc::Mat obj_s, obj_p;
    const double s_ms = best_ms(reps, [&] { obj_s = ccmpc::scenario_objective_terms_serial(scen, eval); });
    const double p_ms = best_ms(reps, [&] { obj_p = ccmpc::scenario_objective_terms(scen, eval); });
    const bool exact =
        obj_s.rows() == obj_p.rows() && (obj_s - obj_p).cwiseAbs().maxCoeff() == 0.0;
    report("scenario_objective_terms", s_ms, p_ms, exact);
  }
  {
    ccmpc::Vec mean_s, var_s, mean_p, var_p;
    const double s_ms = best_ms(reps, [&] { ccmpc::column_moments_serial(off_s, mean_s, var_s); });
    const double p_ms = best_ms(reps, [&] { ccmpc::column_moments(off_s, mean_p, var_p); });
    const bool exact = (mean_s - mean_p).cwiseAbs().maxCoeff() == 0.0 &&
                       (var_s - var_p).cwiseAbs().maxCoeff() == 0.0;
    report("column_moments", s_ms, p_ms, exact);
  }
  {
    const ccmpc::ViolationGroups groups = ccmpc::chance_row_groups(index);
    const ccmpc::Vec gamma_full = ccmpc::Vec::Ones(cfg.horizon * 3);
    const ccmpc::Vec y = eval.lhs(plant.phi_apply(cfg.x0), ccmpc::Vec::Zero(cfg.horizon * 3),
                                  gamma_full);
    std::vector<long> cnt_s, cnt_p;
    const double s_ms =
        best_ms(reps, [&] { cnt_s = ccmpc::violation_counts_serial(y, scen, eval, groups.rows); });
    const double p_ms =
        best_ms(reps, [&] { cnt_p = ccmpc::violation_counts(y, scen, eval, groups.rows); });
    report("violation_counts", s_ms, p_ms, cnt_s == cnt_p);
  }
  return 0;
}
