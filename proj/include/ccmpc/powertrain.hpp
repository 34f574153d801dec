#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ccmpc/exlin.hpp"
#include "ccmpc/risk_problem.hpp"
#include "ccmpc/solver.hpp"

namespace ccmpc {

/// Hybrid-powertrain speed-tracking case study. States are driveshaft torque,
/// vehicle speed (km/h) and battery state of charge (%); inputs are engine
/// torque command, motor torque and friction brake torque. The uncertain
/// parameter is the requested speed over the horizon.
struct PowertrainConfig {
  double dt = 0.1;
  int horizon = 10;
  int run_steps = 120;
  Vec x0 = (Vec(3) << 10.0, 60.0, 30.0).finished();

  double w_speed = 10.0;
  double w_eng = 1e-3;
  double w_mot = 5e-5;
  double w_brk = 1e-2;
  double w_soc = 10.0;
  double w_delta = 1e-6;
  double delta_bar = 0.012;
  double eps_floor = 1e-9;
  int samples = 1024;
  DistributionMode mode = DistributionMode::mv;
  std::uint64_t seed = 1;

  // Requested-speed process: piecewise-constant mean acceleration (km/h/s),
  // i.i.d. Gaussian acceleration noise, integrated and floored.
  int interval_steps = 20;
  std::vector<double> accel_means = {2.5, 0.0, -2.5, 1.2, -1.2, 2.4};
  double accel_std = 0.15;
  double v_req0 = 60.0;
  double speed_floor = 1.0;

  // Core dynamics in transformed coordinates.
  double eng_pole = 0.8;
  double drag_pole = 0.997;
  double gain_tau = 0.02;
  double gain_mot = 0.02;
  double gain_brk = 0.025;
  double bias_v = 0.06;
  double soc_mot = 0.004;
  double bias_s = 0.004;

  // Bounds and lookups (physical coordinates).
  double eng_cap0 = 24.0, eng_cap_slope = -0.25, eng_cap_ref = 60.0;
  double soc_lo = 20.0, soc_hi = 80.0;
  double soc_tgt0 = 29.5, soc_tgt_slope = 0.1, soc_tgt_ref = 60.0;
  double mot_power_num = 720.0;  ///< |motor torque| <= mot_power_num / v_req
  double mot_box = 16.0;         ///< torque limit, governs below the crossover speed
  double brk_max = 20.0;

  // Coordinate changes: per-channel x + b x^3 state maps, input maps
  // scale(x) * (u + d u^3) with a smooth speed-dependent scale.
  double phi_b_tau = 2e-5, phi_b_v = 1e-6, phi_b_s = 1e-5;
  double psi_d_eng = 1e-6, psi_d_mot = 5e-7, psi_d_brk = 2e-6;
  double scale_gain = 0.02, scale_ref = 60.0;

  void validate() const;
};

/// Requested-speed process: one frozen true realization plus the conditional
/// law used for scenario generation. At step t the current and next requests
/// are known; later ones accumulate fresh acceleration noise.
struct SpeedScenarioModel {
  double dt = 0.1;
  int interval_steps = 20;
  std::vector<double> accel_means;
  double accel_std = 0;
  double speed_floor = 1.0;
  Vec true_profile;  ///< length run_steps + horizon + 1

  int interval_of(int t) const {
    const int n = static_cast<int>(accel_means.size());
    return std::min(t / interval_steps, n - 1);
  }
  /// Moments of theta_{t+k} given the information available at step t,
  /// ignoring the (far away) speed floor.
  double prior_mean(int t, int k) const;
  double prior_std(int t, int k) const;
};

SpeedScenarioModel build_speed_model(const PowertrainConfig& cfg);
ScenarioSet sample_speed_scenarios(const SpeedScenarioModel& m, const PowertrainConfig& cfg,
                                   int t);

ExlinModel build_powertrain_model(const PowertrainConfig& cfg);
SpecBundle build_physical_spec(const PowertrainConfig& cfg);

/// Reporting families of the uncertain rows.
enum : int { kFamEngine = 0, kFamMotorPower = 1, kFamSocSoft = 2, kNumFamilies = 3 };
extern const char* const kFamilyNames[kNumFamilies];
void assign_row_families(ConstraintIndexMap& index);
ViolationGroups chance_row_groups(const ConstraintIndexMap& index);

enum class Variant { optimized, uniform, deterministic };
Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct StepRecord {
  int t = 0;
  double v_req_true = 0;
  Vec x;   ///< physical state at the start of the step
  Vec u;   ///< applied physical input
  Vec v0;  ///< committed transformed input
  SolveStatus status = SolveStatus::max_iter;
  int newton_iters = 0;
  bool used_phase1 = false;
  bool fallback = false;  ///< shifted previous plan applied instead
  double objective = 0, objective_excl_reg = 0;
  double paired_uniform_objective = 0;  ///< optimized runs: same instance, flat risk
  bool paired_ok = false;
  double delta_sum = 0, lambda = 0, kkt_residual = 0, gap = 0;
  Vec family_delta;      ///< risk mass per family
  Vec family_violation;  ///< empirical violation per family
  double joint_violation = 0;
  double prior_std_end = 0;  ///< request std at the horizon end (diagnostic)
  bool probed = false, probe_skipped = false, probe_status_stable = true;
  double probe_ratio = 0;
};

struct MPCLog {
  Variant variant = Variant::optimized;
  std::vector<StepRecord> steps;
  double wall_seconds = 0;
};

struct RunOptions {
  bool paired_uniform = false;
  std::vector<int> probe_steps;  ///< optimized runs: sensitivity probes here
  SolverConfig solver;
};

MPCLog run_mpc(const PowertrainConfig& cfg, Variant variant, const RunOptions& opt = {});

struct Comparison {
  MPCLog optimized, uniform, deterministic;
};
/// All three controllers on the same true request realization and the same
/// per-step scenario draws.
Comparison compare_controllers(const PowertrainConfig& cfg, const RunOptions& opt = {});

struct SweepPoint {
  double delta_bar = 0;
  double objective = 0;
  double objective_excl_reg = 0;
  double delta_sum = 0;
  double lambda = 0;
  SolveStatus status = SolveStatus::max_iter;
};
/// Re-solves the first-step instance under different risk budgets.
std::vector<SweepPoint> sweep_delta_bar(const PowertrainConfig& cfg,
                                        const std::vector<double>& values,
                                        const SolverConfig& solver = {});

}  // namespace ccmpc
