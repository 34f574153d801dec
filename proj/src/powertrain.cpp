// SPDX-License-Identifier: MIT
#include "ccmpc/powertrain.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/stacked.hpp"

namespace ccmpc {

namespace {
constexpr std::uint64_t kTrueStream = 0x747275u;
constexpr std::uint64_t kScenStreamBase = 0x7363656e0000u;
}  // namespace

void PowertrainConfig::validate() const {
  require(dt > 0 && horizon >= 1 && run_steps >= 1, "powertrain: bad horizon setup");
  require(x0.size() == 3, "powertrain: x0 must have 3 states");
  require(samples >= 2, "powertrain: need at least 2 scenario samples");
  require(delta_bar > 0 && delta_bar < 1, "powertrain: risk budget must lie in (0,1)");
  require(eps_floor > 0, "powertrain: risk floor must be positive");
  require(!accel_means.empty() && interval_steps >= 1, "powertrain: empty request profile");
  require(accel_std >= 0, "powertrain: negative request noise");
  require(w_eng > 0 && w_mot > 0 && w_brk > 0 && w_soc > 0 && w_speed >= 0 && w_delta >= 0,
          "powertrain: weights out of range");
  require(mot_power_num > 0 && mot_box > 0 && brk_max > 0, "powertrain: bad input limits");
  require(speed_floor > 0 && v_req0 > speed_floor, "powertrain: bad speed floor");
  require(soc_lo < soc_tgt0 && soc_tgt0 < soc_hi, "powertrain: charge levels out of order");
}

double SpeedScenarioModel::prior_mean(int t, int k) const {
  const int last = static_cast<int>(true_profile.size()) - 1;
  if (k <= 1) return true_profile[std::min(t + k, last)];
  double v = true_profile[std::min(t + 1, last)];
  for (int j = 1; j < k; ++j) v += dt * accel_means[interval_of(t + j)];
  return std::max(speed_floor, v);
}

double SpeedScenarioModel::prior_std(int t, int k) const {
  return k <= 1 ? 0.0 : dt * accel_std * std::sqrt(static_cast<double>(k - 1));
}

SpeedScenarioModel build_speed_model(const PowertrainConfig& cfg) {
  SpeedScenarioModel m;
  m.dt = cfg.dt;
  m.interval_steps = cfg.interval_steps;
  m.accel_means = cfg.accel_means;
  m.accel_std = cfg.accel_std;
  m.speed_floor = cfg.speed_floor;
  const int len = cfg.run_steps + cfg.horizon + 1;
  m.true_profile.resize(len);
  std::mt19937_64 rng(mix_seed(cfg.seed, kTrueStream));
  std::normal_distribution<double> nd(0.0, 1.0);
  m.true_profile[0] = cfg.v_req0;
  for (int t = 0; t + 1 < len; ++t) {
    const double a = cfg.accel_means[m.interval_of(t)] + cfg.accel_std * nd(rng);
    m.true_profile[t + 1] = std::max(cfg.speed_floor, m.true_profile[t] + cfg.dt * a);
  }
  return m;
}

ScenarioSet sample_speed_scenarios(const SpeedScenarioModel& m, const PowertrainConfig& cfg,
                                   int t) {
  require(t >= 0 && t + 1 < static_cast<int>(m.true_profile.size()),
          "sample_speed_scenarios: step outside the realized profile");
  ScenarioSet scen;
  scen.resize(cfg.samples, cfg.horizon, 1);
  const std::uint64_t step_seed =
      mix_seed(cfg.seed, kScenStreamBase + static_cast<std::uint64_t>(t));
  Vec th(1);
  for (int s = 0; s < cfg.samples; ++s) {
    std::mt19937_64 rng(mix_seed(step_seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> nd(0.0, 1.0);
    th[0] = m.true_profile[t];
    scen.set(s, 0, th);
    double v = m.true_profile[t + 1];
    th[0] = v;
    scen.set(s, 1, th);
    for (int k = 1; k < cfg.horizon; ++k) {
      const double a = m.accel_means[m.interval_of(t + k)] + m.accel_std * nd(rng);
      v = std::max(m.speed_floor, v + m.dt * a);
      th[0] = v;
      scen.set(s, k + 1, th);
    }
  }
  return scen;
}

ExlinModel build_powertrain_model(const PowertrainConfig& cfg) {
  cfg.validate();
  ExlinModel m;
  Mat A(3, 3), B(3, 3);
  A << cfg.eng_pole, 0, 0,
      cfg.gain_tau, cfg.drag_pole, 0,
      0, 0, 1.0;
  B << 1.0 - cfg.eng_pole, 0, 0,
      0, cfg.gain_mot, -cfg.gain_brk,
      0, -cfg.soc_mot, 0;
  Vec c0(3);
  c0 << 0.0, cfg.bias_v, cfg.bias_s;
  m.core.A = A;
  m.core.B = B;
  m.core.bias = [c0](const Vec&) { return c0; };
  m.core.bias_theta_dependent = false;
  m.phi = {cubic_map(1.0, cfg.phi_b_tau), cubic_map(1.0, cfg.phi_b_v),
           cubic_map(1.0, cfg.phi_b_s)};
  auto scale = [g = cfg.scale_gain, r = cfg.scale_ref](const Vec& x) {
    return 1.0 + smooth_step(g * (x[1] - r));
  };
  m.psi_in = {InputMap{cubic_map(1.0, cfg.psi_d_eng), scale},
              InputMap{cubic_map(1.0, cfg.psi_d_mot), scale},
              InputMap{cubic_map(1.0, cfg.psi_d_brk), scale}};
  m.validate();
  return m;
}

SpecBundle build_physical_spec(const PowertrainConfig& cfg) {
  SpecBundle s;
  s.n_xi = 3;
  s.n_v = 3;
  const double floor_ = cfg.speed_floor;
  s.xi_req = [](const Vec& th, int) {
    Vec r(3);
    r << 0.0, th[0], 0.0;
    return r;
  };
  s.xi_lo = [lo = cfg.soc_lo](const Vec&, int) {
    Vec b(3);
    b << -kInf, -kInf, lo;
    return b;
  };
  s.xi_hi = [c0 = cfg.eng_cap0, sl = cfg.eng_cap_slope, ref = cfg.eng_cap_ref,
             hi = cfg.soc_hi](const Vec& th, int) {
    Vec b(3);
    b << c0 + sl * (th[0] - ref), kInf, hi;
    return b;
  };
  s.v_lo = [num = cfg.mot_power_num, box = cfg.mot_box, floor_](const Vec& th, int) {
    Vec b(3);
    b << 0.0, std::max(-box, -num / std::max(th[0], floor_)), 0.0;
    return b;
  };
  s.v_hi = [num = cfg.mot_power_num, box = cfg.mot_box, bmax = cfg.brk_max,
            floor_](const Vec& th, int) {
    Vec b(3);
    b << kInf, std::min(box, num / std::max(th[0], floor_)), bmax;
    return b;
  };
  s.soft_bound = [t0 = cfg.soc_tgt0, sl = cfg.soc_tgt_slope,
                  ref = cfg.soc_tgt_ref](const Vec& th, int) {
    Vec b(3);
    b << 0.0, 0.0, t0 + sl * (th[0] - ref);
    return b;
  };
  s.soft_kind = {SoftKind::none, SoftKind::none, SoftKind::lower};
  s.dep_req = {false, true, false};
  s.dep_xi_lo = {false, false, false};
  s.dep_xi_hi = {true, false, false};
  s.dep_v_lo = {false, true, false};
  s.dep_v_hi = {false, true, false};
  s.dep_soft = {false, false, true};
  s.validate();
  return s;
}

const char* const kFamilyNames[kNumFamilies] = {"engine_torque", "motor_power", "soc_soft"};

void assign_row_families(ConstraintIndexMap& index) {
  for (RowRef& r : index.rows) {
    if (r.pruned) {
      r.family = -1;
    } else if (r.block == Block::state_hi && r.ch == 0) {
      r.family = kFamEngine;
    } else if ((r.block == Block::input_lo || r.block == Block::input_hi) && r.ch == 1) {
      r.family = kFamMotorPower;
    } else if (r.block == Block::soft && r.ch == 2) {
      r.family = kFamSocSoft;
    } else {
      r.family = -1;
    }
  }
}

ViolationGroups chance_row_groups(const ConstraintIndexMap& index) {
  ViolationGroups g;
  g.names.assign(kFamilyNames, kFamilyNames + kNumFamilies);
  g.rows.resize(kNumFamilies);
  for (int id = 0; id < index.n_rows(); ++id) {
    const RowRef& r = index.rows[id];
    if (!r.pruned && r.theta_dep && r.family >= 0) g.rows[r.family].push_back(id);
  }
  return g;
}

Variant parse_variant(const std::string& name) {
  if (name == "optimized") return Variant::optimized;
  if (name == "uniform") return Variant::uniform;
  if (name == "deterministic") return Variant::deterministic;
  throw ConfigError("unknown variant: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::optimized: return "optimized";
    case Variant::uniform: return "uniform";
    default: return "deterministic";
  }
}

MPCLog run_mpc(const PowertrainConfig& cfg, Variant variant, const RunOptions& opt) {
  cfg.validate();
  const ExlinModel m = build_powertrain_model(cfg);
  const SpecBundle phys = build_physical_spec(cfg);
  const StackedSystem stacked = stack_dynamics(m.core, cfg.horizon);
  const SpeedScenarioModel speed = build_speed_model(cfg);
  Weights w;
  w.w_req = (Vec(3) << 0.0, cfg.w_speed, 0.0).finished();
  w.w_v = (Vec(3) << cfg.w_eng, cfg.w_mot, cfg.w_brk).finished();
  w.w_soft = (Vec(3) << 0.0, 0.0, cfg.w_soc).finished();
  w.w_delta = cfg.w_delta;
  const RiskBudget budget{cfg.delta_bar, cfg.eps_floor};

  MPCLog log;
  log.variant = variant;
  Vec x = cfg.x0;
  Mat prev_plan;  // transformed predicted states of the executed plan
  Solution warm;
  bool have_warm = false;

  const auto t_begin = std::chrono::steady_clock::now();
  for (int t = 0; t < cfg.run_steps; ++t) {
    const ScenarioSet scen = sample_speed_scenarios(speed, cfg, t);
    const Mat x_pred = resolve_operating_states(m, x, prev_plan);
    const SpecBundle spec_t = transform_spec(m, phys, x_pred);
    ConstraintIndexMap index = build_index_map(spec_t, m.core, cfg.horizon, scen.at(0, 0));
    assign_row_families(index);
    const ConstraintEvaluator eval(m.core, spec_t, stacked, index);
    const MomentSummary mom = estimate_moments(scen, eval);
    const Vec xi0 = m.phi_apply(x);

    StepRecord rec;
    rec.t = t;
    rec.v_req_true = speed.true_profile[t];
    rec.x = x;
    rec.prior_std_end = speed.prior_std(t, cfg.horizon);

    RiskProblem P;
    Solution sol;
    if (variant == Variant::deterministic) {
      P = assemble_deterministic(eval, w, xi0, scen.mean_traj());
      sol = solve_deterministic(P, opt.solver);
    } else {
      P = assemble(eval, mom, w, xi0, budget, cfg.mode);
      if (t == 0) {
        warm = Solution{};
        warm.v_hat = Vec::Ones(P.N * P.n_v);
        warm.gamma_act = Vec::Ones(P.n_gamma());
        warm.delta = uniform_allocation(budget, P.nc());
        have_warm = true;
      }
      if (variant == Variant::optimized) {
        sol = solve(P, opt.solver, have_warm ? &warm : nullptr);
        if (opt.paired_uniform && sol.status == SolveStatus::optimal) {
          const Vec du = uniform_allocation(budget, P.nc());
          const Solution solu = solve_fixed_risk(P, du, opt.solver, have_warm ? &warm : nullptr);
          rec.paired_ok = solu.status == SolveStatus::optimal;
          rec.paired_uniform_objective = solu.objective;
        }
      } else {
        const Vec du = uniform_allocation(budget, P.nc());
        sol = solve_fixed_risk(P, du, opt.solver, have_warm ? &warm : nullptr);
      }
    }

    rec.status = sol.status;
    rec.newton_iters = sol.newton_iters;
    rec.used_phase1 = sol.used_phase1;
    rec.objective = sol.objective;
    rec.objective_excl_reg = sol.objective_excl_reg;
    rec.lambda = sol.lambda;
    rec.kkt_residual = sol.kkt_residual;
    rec.gap = sol.gap;

    Solution plan;
    if (sol.status == SolveStatus::optimal || !have_warm) {
      plan = sol;
    } else {
      plan = warm;
      rec.fallback = true;
    }

    rec.family_delta = Vec::Zero(kNumFamilies);
    if (plan.delta.size() == P.nc() && P.nc() > 0) {
      rec.delta_sum = plan.delta.sum();
      for (int ci = 0; ci < P.nc(); ++ci) {
        if (P.chance[ci].family >= 0) rec.family_delta[P.chance[ci].family] += plan.delta[ci];
      }
    }

    const Vec y = build_lhs(stacked, index, xi0, plan.v_hat, plan.gamma_full);
    const ViolationGroups groups = chance_row_groups(index);
    const ViolationReport vr = empirical_violation(y, scen, eval, groups);
    rec.family_violation = vr.per_group;
    rec.joint_violation = vr.joint;

    if (variant == Variant::optimized && sol.status == SolveStatus::optimal &&
        std::find(opt.probe_steps.begin(), opt.probe_steps.end(), t) != opt.probe_steps.end()) {
      auto rebuild = [&](const Vec& x0p) {
        return assemble(eval, mom, w, x0p, budget, cfg.mode);
      };
      const ProbeReport pr = lipschitz_probe(P, sol, xi0, rebuild, opt.solver);
      rec.probed = true;
      rec.probe_skipped = pr.skipped;
      rec.probe_status_stable = pr.status_stable;
      rec.probe_ratio = pr.ratio;
    }

    const Vec v0 = plan.v_hat.head(3);
    const Vec u0 = m.input_invert(v0, x);
    rec.v0 = v0;
    rec.u = u0;
    Vec theta_now(1);
    theta_now << speed.true_profile[t];
    x = m.step(x, u0, theta_now);

    const Vec p = stacked.A_hat * xi0 + stacked.B_hat * plan.v_hat;
    prev_plan = Eigen::Map<const Mat>(p.data(), 3, cfg.horizon);
    warm = warm_shift(plan, P);
    have_warm = variant != Variant::deterministic;

    log.steps.push_back(std::move(rec));
  }
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return log;
}

std::vector<SweepPoint> sweep_delta_bar(const PowertrainConfig& cfg,
                                        const std::vector<double>& values,
                                        const SolverConfig& solver) {
  cfg.validate();
  const ExlinModel m = build_powertrain_model(cfg);
  const SpecBundle phys = build_physical_spec(cfg);
  const StackedSystem stacked = stack_dynamics(m.core, cfg.horizon);
  const SpeedScenarioModel speed = build_speed_model(cfg);
  const ScenarioSet scen = sample_speed_scenarios(speed, cfg, 0);
  const Mat x_pred = resolve_operating_states(m, cfg.x0, Mat());
  const SpecBundle spec_t = transform_spec(m, phys, x_pred);
  ConstraintIndexMap index = build_index_map(spec_t, m.core, cfg.horizon, scen.at(0, 0));
  assign_row_families(index);
  const ConstraintEvaluator eval(m.core, spec_t, stacked, index);
  const MomentSummary mom = estimate_moments(scen, eval);
  const Vec xi0 = m.phi_apply(cfg.x0);
  Weights w;
  w.w_req = (Vec(3) << 0.0, cfg.w_speed, 0.0).finished();
  w.w_v = (Vec(3) << cfg.w_eng, cfg.w_mot, cfg.w_brk).finished();
  w.w_soft = (Vec(3) << 0.0, 0.0, cfg.w_soc).finished();
  w.w_delta = cfg.w_delta;

  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (double v : values) {
    require(v > 0 && v < 1, "sweep_delta_bar: budgets must lie in (0,1)");
    const RiskProblem P = assemble(eval, mom, w, xi0, RiskBudget{v, cfg.eps_floor}, cfg.mode);
    const Solution sol = solve(P, solver);
    SweepPoint p;
    p.delta_bar = v;
    p.objective = sol.objective;
    p.objective_excl_reg = sol.objective_excl_reg;
    p.delta_sum = sol.delta.size() > 0 ? sol.delta.sum() : 0.0;
    p.lambda = sol.lambda;
    p.status = sol.status;
    out.push_back(p);
  }
  return out;
}

Comparison compare_controllers(const PowertrainConfig& cfg, const RunOptions& opt) {
  Comparison c;
  RunOptions main_opt = opt;
  main_opt.paired_uniform = true;
  c.optimized = run_mpc(cfg, Variant::optimized, main_opt);
  RunOptions rest = opt;
  rest.paired_uniform = false;
  rest.probe_steps.clear();
  c.uniform = run_mpc(cfg, Variant::uniform, rest);
  c.deterministic = run_mpc(cfg, Variant::deterministic, rest);
  return c;
}

}  // namespace ccmpc
