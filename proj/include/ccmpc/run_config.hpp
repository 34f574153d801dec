#pragma once

#include <string>
#include <vector>

#include "ccmpc/powertrain.hpp"

namespace ccmpc {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kConfigSchema = "ccmpc-run-v1";
inline constexpr const char* kManifestSchema = "ccmpc-manifest-v1";

/// Resolved run setup: case-study parameters plus run-shape options. Loaded
/// from a strict-schema JSON file; unknown keys are rejected. A manifest
/// written by a previous run is accepted in place of a config and reproduces
/// that run.
struct RunConfig {
  PowertrainConfig pt;
  std::string variant = "optimized";
  bool probes_enabled = true;
  std::vector<int> probe_steps;  ///< empty: ten evenly spaced steps

  std::vector<int> resolved_probe_steps() const;
};

RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& rc);  ///< full resolved echo

/// Output directory precedence: explicit CLI value, then CCMPC_OUT_DIR, then
/// the fallback.
std::string resolve_out_dir(const std::string& cli_value, const std::string& fallback);

/// Writes trajectory.csv, risk.csv, violation.csv, solver.csv, summary.csv and
/// manifest.json for one closed-loop run.
void write_run_outputs(const std::string& dir, const RunConfig& rc, const MPCLog& log);

/// Writes sweep.csv and manifest.json for a budget sweep.
void write_sweep_outputs(const std::string& dir, const RunConfig& rc,
                         const std::vector<SweepPoint>& points);

}  // namespace ccmpc
