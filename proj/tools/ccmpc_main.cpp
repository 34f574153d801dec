// SPDX-License-Identifier: MIT
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ccmpc/run_config.hpp"
#include "ccmpc/validation.hpp"

namespace {

int print_results(const std::vector<ccmpc::CheckResult>& rs) {
  for (const auto& r : rs)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
  return ccmpc::all_pass(rs) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained predictive control with joint risk allocation"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Closed-loop run of the powertrain case study");
  std::string sim_config, sim_variant, sim_out;
  long long sim_seed = -1;
  sim->add_option("--config", sim_config, "Run configuration JSON (a manifest.json also works)")
      ->required();
  sim->add_option("--variant", sim_variant,
                  "optimized | uniform | deterministic (overrides the config)");
  sim->add_option("--seed", sim_seed, "Seed override (nonnegative)");
  sim->add_option("--out", sim_out, "Output directory (default: CCMPC_OUT_DIR, then ./out)");

  auto* val = app.add_subcommand("validate", "Self-contained numerical validation suites");
  std::string suite = "all";
  std::uint64_t val_seed = 7;
  val->add_option("--suite", suite, "inequalities | convexity | solver | exlin | stacking | all")
      ->check(CLI::IsMember({"inequalities", "convexity", "solver", "exlin", "stacking", "all"}));
  val->add_option("--seed", val_seed, "Suite seed");

  auto* swp = app.add_subcommand("sweep", "Re-solve the first-step instance across risk budgets");
  std::string swp_config, swp_param = "delta_bar", swp_out;
  std::vector<double> swp_values;
  swp->add_option("--config", swp_config, "Run configuration JSON")->required();
  swp->add_option("--param", swp_param, "Swept parameter")->check(CLI::IsMember({"delta_bar"}));
  swp->add_option("--values", swp_values, "Comma-separated budget values in (0,1)")
      ->delimiter(',')
      ->required();
  swp->add_option("--out", swp_out, "Output directory (default: CCMPC_OUT_DIR, then ./out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      ccmpc::RunConfig rc = ccmpc::load_run_config(sim_config);
      if (!sim_variant.empty()) rc.variant = sim_variant;
      if (sim_seed >= 0) rc.pt.seed = static_cast<std::uint64_t>(sim_seed);
      const ccmpc::Variant variant = ccmpc::parse_variant(rc.variant);
      rc.pt.validate();

      ccmpc::RunOptions opt;
      opt.paired_uniform = variant == ccmpc::Variant::optimized;
      if (rc.probes_enabled && variant == ccmpc::Variant::optimized)
        opt.probe_steps = rc.resolved_probe_steps();

      const ccmpc::MPCLog log = ccmpc::run_mpc(rc.pt, variant, opt);
      const std::string dir = ccmpc::resolve_out_dir(sim_out, "out");
      ccmpc::write_run_outputs(dir, rc, log);
      std::cout << "variant " << ccmpc::variant_name(variant) << ", " << log.steps.size()
                << " steps, wall " << log.wall_seconds << " s\n"
                << "wrote " << dir
                << "/{trajectory,risk,violation,solver,summary}.csv and manifest.json\n";
      return 0;
    }

    if (val->parsed()) {
      std::vector<ccmpc::CheckResult> rs;
      auto append = [&rs](std::vector<ccmpc::CheckResult> v) {
        for (auto& r : v) rs.push_back(std::move(r));
      };
      if (suite == "inequalities" || suite == "all") append(ccmpc::run_inequality_suite(val_seed));
      if (suite == "convexity" || suite == "all") append(ccmpc::run_convexity_suite());
      if (suite == "solver" || suite == "all") append(ccmpc::run_solver_suite(val_seed));
      if (suite == "exlin" || suite == "all") append(ccmpc::run_exlin_suite(val_seed));
      if (suite == "stacking" || suite == "all") append(ccmpc::run_stacking_suite(val_seed));
      return print_results(rs);
    }

    if (swp->parsed()) {
      ccmpc::RunConfig rc = ccmpc::load_run_config(swp_config);
      rc.pt.validate();
      for (double v : swp_values)
        ccmpc::require(v > 0.0 && v < 1.0, "sweep: budget values must lie in (0,1)");
      const std::vector<ccmpc::SweepPoint> points = ccmpc::sweep_delta_bar(rc.pt, swp_values);
      const std::string dir = ccmpc::resolve_out_dir(swp_out, "out");
      ccmpc::write_sweep_outputs(dir, rc, points);
      std::cout << "wrote " << dir << "/sweep.csv and manifest.json\n";
      return 0;
    }
  } catch (const ccmpc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
