// SPDX-License-Identifier: MIT
#include "ccmpc/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ccmpc/csv.hpp"

namespace ccmpc {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& ctx) {
  if (!j.is_object()) fail(ctx + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail("unknown key '" + item.key() + "' in " + ctx);
    }
  }
}

double as_num(const json& j, const std::string& ctx) {
  if (!j.is_number()) fail(ctx + " must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) fail(ctx + " must be an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& ctx) {
  if (!j.is_boolean()) fail(ctx + " must be a boolean");
  return j.get<bool>();
}

std::string as_str(const json& j, const std::string& ctx) {
  if (!j.is_string()) fail(ctx + " must be a string");
  return j.get<std::string>();
}

void read_num(const json& j, const char* key, const std::string& ctx, double& out) {
  if (j.contains(key)) out = as_num(j.at(key), ctx + "." + key);
}

void read_int(const json& j, const char* key, const std::string& ctx, int& out) {
  if (j.contains(key)) out = as_int(j.at(key), ctx + "." + key);
}

std::vector<double> as_num_array(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) fail(ctx + " must be a non-empty array of numbers");
  std::vector<double> v;
  for (size_t i = 0; i < j.size(); ++i) v.push_back(as_num(j.at(i), ctx));
  return v;
}

Vec as_vec3(const json& j, const std::string& ctx) {
  const std::vector<double> v = as_num_array(j, ctx);
  if (v.size() != 3) fail(ctx + " must have exactly 3 entries");
  return Eigen::Map<const Vec>(v.data(), 3);
}

void parse_run_config(const json& j, RunConfig& rc) {
  check_keys(j, {"schema", "variant", "horizon", "run_steps", "dt", "samples", "delta_bar",
                 "eps_floor", "seed", "mode", "weights", "request", "plant", "bounds", "probes"},
             "config");
  if (!j.contains("schema") || as_str(j.at("schema"), "config.schema") != kConfigSchema) {
    fail(std::string("config.schema must be \"") + kConfigSchema + "\"");
  }
  PowertrainConfig& p = rc.pt;
  if (j.contains("variant")) {
    rc.variant = as_str(j.at("variant"), "config.variant");
    parse_variant(rc.variant);
  }
  read_int(j, "horizon", "config", p.horizon);
  read_int(j, "run_steps", "config", p.run_steps);
  read_num(j, "dt", "config", p.dt);
  read_int(j, "samples", "config", p.samples);
  read_num(j, "delta_bar", "config", p.delta_bar);
  read_num(j, "eps_floor", "config", p.eps_floor);
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && s.get<long long>() < 0)) {
      fail("config.seed must be a non-negative integer");
    }
    p.seed = s.get<std::uint64_t>();
  }
  if (j.contains("mode")) {
    const std::string m = as_str(j.at("mode"), "config.mode");
    if (m != "mv") fail("config.mode: the case study runs with \"mv\"");
    p.mode = DistributionMode::mv;
  }
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    check_keys(w, {"speed", "engine", "motor", "brake", "soc", "risk"}, "config.weights");
    read_num(w, "speed", "config.weights", p.w_speed);
    read_num(w, "engine", "config.weights", p.w_eng);
    read_num(w, "motor", "config.weights", p.w_mot);
    read_num(w, "brake", "config.weights", p.w_brk);
    read_num(w, "soc", "config.weights", p.w_soc);
    read_num(w, "risk", "config.weights", p.w_delta);
  }
  if (j.contains("request")) {
    const json& r = j.at("request");
    check_keys(r, {"interval_steps", "accel_means", "accel_std", "v0", "floor"},
               "config.request");
    read_int(r, "interval_steps", "config.request", p.interval_steps);
    if (r.contains("accel_means")) {
      p.accel_means = as_num_array(r.at("accel_means"), "config.request.accel_means");
    }
    read_num(r, "accel_std", "config.request", p.accel_std);
    read_num(r, "v0", "config.request", p.v_req0);
    read_num(r, "floor", "config.request", p.speed_floor);
  }
  if (j.contains("plant")) {
    const json& pl = j.at("plant");
    check_keys(pl, {"x0", "eng_pole", "drag_pole", "gain_tau", "gain_mot", "gain_brk",
                    "bias_v", "soc_mot", "bias_s", "phi_b", "psi_d", "scale_gain", "scale_ref"},
               "config.plant");
    if (pl.contains("x0")) p.x0 = as_vec3(pl.at("x0"), "config.plant.x0");
    read_num(pl, "eng_pole", "config.plant", p.eng_pole);
    read_num(pl, "drag_pole", "config.plant", p.drag_pole);
    read_num(pl, "gain_tau", "config.plant", p.gain_tau);
    read_num(pl, "gain_mot", "config.plant", p.gain_mot);
    read_num(pl, "gain_brk", "config.plant", p.gain_brk);
    read_num(pl, "bias_v", "config.plant", p.bias_v);
    read_num(pl, "soc_mot", "config.plant", p.soc_mot);
    read_num(pl, "bias_s", "config.plant", p.bias_s);
    if (pl.contains("phi_b")) {
      const Vec b = as_vec3(pl.at("phi_b"), "config.plant.phi_b");
      p.phi_b_tau = b[0];
      p.phi_b_v = b[1];
      p.phi_b_s = b[2];
    }
    if (pl.contains("psi_d")) {
      const Vec d = as_vec3(pl.at("psi_d"), "config.plant.psi_d");
      p.psi_d_eng = d[0];
      p.psi_d_mot = d[1];
      p.psi_d_brk = d[2];
    }
    read_num(pl, "scale_gain", "config.plant", p.scale_gain);
    read_num(pl, "scale_ref", "config.plant", p.scale_ref);
  }
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    check_keys(b, {"eng_cap0", "eng_cap_slope", "eng_cap_ref", "soc_lo", "soc_hi", "soc_tgt0",
                   "soc_tgt_slope", "soc_tgt_ref", "mot_power_num", "mot_box", "brk_max"},
               "config.bounds");
    read_num(b, "eng_cap0", "config.bounds", p.eng_cap0);
    read_num(b, "eng_cap_slope", "config.bounds", p.eng_cap_slope);
    read_num(b, "eng_cap_ref", "config.bounds", p.eng_cap_ref);
    read_num(b, "soc_lo", "config.bounds", p.soc_lo);
    read_num(b, "soc_hi", "config.bounds", p.soc_hi);
    read_num(b, "soc_tgt0", "config.bounds", p.soc_tgt0);
    read_num(b, "soc_tgt_slope", "config.bounds", p.soc_tgt_slope);
    read_num(b, "soc_tgt_ref", "config.bounds", p.soc_tgt_ref);
    read_num(b, "mot_power_num", "config.bounds", p.mot_power_num);
    read_num(b, "mot_box", "config.bounds", p.mot_box);
    read_num(b, "brk_max", "config.bounds", p.brk_max);
  }
  if (j.contains("probes")) {
    const json& pr = j.at("probes");
    check_keys(pr, {"enabled", "steps"}, "config.probes");
    if (pr.contains("enabled")) rc.probes_enabled = as_bool(pr.at("enabled"), "config.probes.enabled");
    if (pr.contains("steps")) {
      if (!pr.at("steps").is_array()) fail("config.probes.steps must be an array");
      rc.probe_steps.clear();
      for (const auto& e : pr.at("steps")) {
        const int t = as_int(e, "config.probes.steps");
        if (t < 0 || t >= p.run_steps) fail("config.probes.steps entries must lie in the run");
        rc.probe_steps.push_back(t);
      }
    }
  }
  p.validate();
}

}  // namespace

std::vector<int> RunConfig::resolved_probe_steps() const {
  if (!probes_enabled) return {};
  std::set<int> steps;
  if (!probe_steps.empty()) {
    steps.insert(probe_steps.begin(), probe_steps.end());
  } else {
    for (int i = 0; i < 10; ++i) {
      steps.insert(std::min(pt.run_steps - 1, pt.run_steps * (2 * i + 1) / 20));
    }
  }
  return {steps.begin(), steps.end()};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) fail("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("schema")) fail("config must carry a schema key");
  const std::string schema = as_str(j.at("schema"), "schema");
  RunConfig rc;
  if (schema == kManifestSchema) {
    check_keys(j, {"schema", "tool_version", "variant", "seed", "config", "outputs"},
               "manifest");
    if (!j.contains("config")) fail("manifest lacks the config echo");
    parse_run_config(j.at("config"), rc);
    if (j.contains("variant")) {
      rc.variant = as_str(j.at("variant"), "manifest.variant");
      parse_variant(rc.variant);
    }
    if (j.contains("seed")) rc.pt.seed = j.at("seed").get<std::uint64_t>();
    return rc;
  }
  parse_run_config(j, rc);
  return rc;
}

std::string run_config_json(const RunConfig& rc) {
  const PowertrainConfig& p = rc.pt;
  json j;
  j["schema"] = kConfigSchema;
  j["variant"] = rc.variant;
  j["horizon"] = p.horizon;
  j["run_steps"] = p.run_steps;
  j["dt"] = p.dt;
  j["samples"] = p.samples;
  j["delta_bar"] = p.delta_bar;
  j["eps_floor"] = p.eps_floor;
  j["seed"] = p.seed;
  j["mode"] = "mv";
  j["weights"] = {{"speed", p.w_speed}, {"engine", p.w_eng},   {"motor", p.w_mot},
                  {"brake", p.w_brk},   {"soc", p.w_soc},      {"risk", p.w_delta}};
  j["request"] = {{"interval_steps", p.interval_steps},
                  {"accel_means", p.accel_means},
                  {"accel_std", p.accel_std},
                  {"v0", p.v_req0},
                  {"floor", p.speed_floor}};
  j["plant"] = {{"x0", std::vector<double>{p.x0[0], p.x0[1], p.x0[2]}},
                {"eng_pole", p.eng_pole},
                {"drag_pole", p.drag_pole},
                {"gain_tau", p.gain_tau},
                {"gain_mot", p.gain_mot},
                {"gain_brk", p.gain_brk},
                {"bias_v", p.bias_v},
                {"soc_mot", p.soc_mot},
                {"bias_s", p.bias_s},
                {"phi_b", std::vector<double>{p.phi_b_tau, p.phi_b_v, p.phi_b_s}},
                {"psi_d", std::vector<double>{p.psi_d_eng, p.psi_d_mot, p.psi_d_brk}},
                {"scale_gain", p.scale_gain},
                {"scale_ref", p.scale_ref}};
  j["bounds"] = {{"eng_cap0", p.eng_cap0},
                 {"eng_cap_slope", p.eng_cap_slope},
                 {"eng_cap_ref", p.eng_cap_ref},
                 {"soc_lo", p.soc_lo},
                 {"soc_hi", p.soc_hi},
                 {"soc_tgt0", p.soc_tgt0},
                 {"soc_tgt_slope", p.soc_tgt_slope},
                 {"soc_tgt_ref", p.soc_tgt_ref},
                 {"mot_power_num", p.mot_power_num},
                 {"mot_box", p.mot_box},
                 {"brk_max", p.brk_max}};
  j["probes"] = {{"enabled", rc.probes_enabled}, {"steps", rc.resolved_probe_steps()}};
  return j.dump(2) + "\n";
}

std::string resolve_out_dir(const std::string& cli_value, const std::string& fallback) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("CCMPC_OUT_DIR"); env && *env) return env;
  return fallback;
}

namespace {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    default: return "max_iter";
  }
}

void write_manifest(const std::string& dir, const RunConfig& rc,
                    const std::vector<std::string>& outputs) {
  json mj;
  mj["schema"] = kManifestSchema;
  mj["tool_version"] = kToolVersion;
  mj["variant"] = rc.variant;
  mj["seed"] = rc.pt.seed;
  mj["config"] = json::parse(run_config_json(rc));
  json out = json::object();
  for (const std::string& f : outputs) {
    const auto dot = f.find('.');
    out[f.substr(0, dot)] = f;
  }
  mj["outputs"] = out;
  std::ofstream o(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
  require(o.good(), "cannot write manifest in " + dir);
  o << mj.dump(2) << "\n";
}

}  // namespace

void write_run_outputs(const std::string& dir, const RunConfig& rc, const MPCLog& log) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    CsvWriter w((base / "trajectory.csv").string());
    w.header({"step", "v_req_true", "tau_ds", "speed", "soc", "u_eng", "u_mot", "u_brk",
              "v_eng", "v_mot", "v_brk", "track_err"});
    for (const StepRecord& r : log.steps) {
      w.row({CsvWriter::cell(r.t), CsvWriter::cell(r.v_req_true), CsvWriter::cell(r.x[0]),
             CsvWriter::cell(r.x[1]), CsvWriter::cell(r.x[2]), CsvWriter::cell(r.u[0]),
             CsvWriter::cell(r.u[1]), CsvWriter::cell(r.u[2]), CsvWriter::cell(r.v0[0]),
             CsvWriter::cell(r.v0[1]), CsvWriter::cell(r.v0[2]),
             CsvWriter::cell(r.x[1] - r.v_req_true)});
    }
  }
  {
    CsvWriter w((base / "risk.csv").string());
    w.header({"step", "delta_sum", "lambda", "delta_engine_torque", "delta_motor_power",
              "delta_soc_soft", "prior_std_end"});
    for (const StepRecord& r : log.steps) {
      w.row({CsvWriter::cell(r.t), CsvWriter::cell(r.delta_sum), CsvWriter::cell(r.lambda),
             CsvWriter::cell(r.family_delta[kFamEngine]),
             CsvWriter::cell(r.family_delta[kFamMotorPower]),
             CsvWriter::cell(r.family_delta[kFamSocSoft]), CsvWriter::cell(r.prior_std_end)});
    }
  }
  {
    CsvWriter w((base / "violation.csv").string());
    w.header({"step", "viol_engine_torque", "viol_motor_power", "viol_soc_soft", "viol_joint"});
    for (const StepRecord& r : log.steps) {
      w.row({CsvWriter::cell(r.t), CsvWriter::cell(r.family_violation[kFamEngine]),
             CsvWriter::cell(r.family_violation[kFamMotorPower]),
             CsvWriter::cell(r.family_violation[kFamSocSoft]),
             CsvWriter::cell(r.joint_violation)});
    }
  }
  {
    CsvWriter w((base / "solver.csv").string());
    w.header({"step", "status", "newton_iters", "used_phase1", "fallback", "objective",
              "objective_excl_reg", "paired_objective", "paired_ok", "kkt_residual", "gap",
              "probed", "probe_ratio", "probe_skipped"});
    for (const StepRecord& r : log.steps) {
      w.row({CsvWriter::cell(r.t), status_name(r.status), CsvWriter::cell(r.newton_iters),
             CsvWriter::cell(static_cast<int>(r.used_phase1)),
             CsvWriter::cell(static_cast<int>(r.fallback)), CsvWriter::cell(r.objective),
             CsvWriter::cell(r.objective_excl_reg),
             CsvWriter::cell(r.paired_ok ? r.paired_uniform_objective : 0.0),
             CsvWriter::cell(static_cast<int>(r.paired_ok)), CsvWriter::cell(r.kkt_residual),
             CsvWriter::cell(r.gap), CsvWriter::cell(static_cast<int>(r.probed)),
             CsvWriter::cell(r.probe_ratio),
             CsvWriter::cell(static_cast<int>(r.probe_skipped))});
    }
  }
  {
    double max_gap = 0, min_lambda = kInf, max_joint = 0, sum_joint = 0;
    double max_kkt = 0, sum_abs_err = 0, obj_total = 0, paired_total = 0, probe_max = 0;
    int phase1_steps = 0, fallback_steps = 0, paired_steps = 0, probed_steps = 0;
    const double n = static_cast<double>(log.steps.empty() ? 1 : log.steps.size());
    for (const StepRecord& r : log.steps) {
      if (log.variant != Variant::deterministic) {
        max_gap = std::max(max_gap, std::abs(r.delta_sum - rc.pt.delta_bar));
        min_lambda = std::min(min_lambda, r.lambda);
      }
      max_joint = std::max(max_joint, r.joint_violation);
      sum_joint += r.joint_violation;
      max_kkt = std::max(max_kkt, r.kkt_residual);
      sum_abs_err += std::abs(r.x[1] - r.v_req_true);
      obj_total += r.objective;
      phase1_steps += r.used_phase1 ? 1 : 0;
      fallback_steps += r.fallback ? 1 : 0;
      if (r.paired_ok) {
        paired_total += r.paired_uniform_objective;
        ++paired_steps;
      }
      if (r.probed && !r.probe_skipped) {
        probe_max = std::max(probe_max, r.probe_ratio);
        ++probed_steps;
      }
    }
    if (min_lambda == kInf) min_lambda = 0;
    CsvWriter w((base / "summary.csv").string());
    w.header({"variant", "steps", "max_budget_gap", "min_lambda", "max_joint_violation",
              "mean_joint_violation", "max_kkt", "phase1_steps", "fallback_steps",
              "mean_abs_track_err", "objective_total", "paired_total", "paired_steps",
              "probe_max_ratio", "probed_steps"});
    w.row({variant_name(log.variant), CsvWriter::cell(static_cast<int>(log.steps.size())),
           CsvWriter::cell(max_gap), CsvWriter::cell(min_lambda), CsvWriter::cell(max_joint),
           CsvWriter::cell(sum_joint / n), CsvWriter::cell(max_kkt),
           CsvWriter::cell(phase1_steps), CsvWriter::cell(fallback_steps),
           CsvWriter::cell(sum_abs_err / n), CsvWriter::cell(obj_total),
           CsvWriter::cell(paired_total), CsvWriter::cell(paired_steps),
           CsvWriter::cell(probe_max), CsvWriter::cell(probed_steps)});
  }
  write_manifest(dir, rc,
                 {"trajectory.csv", "risk.csv", "violation.csv", "solver.csv", "summary.csv"});
}

void write_sweep_outputs(const std::string& dir, const RunConfig& rc,
                         const std::vector<SweepPoint>& points) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  CsvWriter w((fs::path(dir) / "sweep.csv").string());
  w.header({"delta_bar", "status", "objective", "objective_excl_reg", "delta_sum", "lambda"});
  for (const SweepPoint& p : points) {
    w.row({CsvWriter::cell(p.delta_bar), status_name(p.status), CsvWriter::cell(p.objective),
           CsvWriter::cell(p.objective_excl_reg), CsvWriter::cell(p.delta_sum),
           CsvWriter::cell(p.lambda)});
  }
  write_manifest(dir, rc, {"sweep.csv"});
}

}  // namespace ccmpc
