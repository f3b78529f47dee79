#pragma once

#include <string>
#include <vector>

#include "rmf/experiments/regime.hpp"

namespace rmf::experiments {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

const std::vector<std::string>& experiment_kinds();

struct RunOptions {
  std::string out_root = "out";
  bool force = false;        // run even when a theorem gate fails
  int threads = 0;           // 0 = OpenMP default
  std::string config_path;   // recorded with its hash in the manifest
};

struct RunResult {
  int exit_code = exit_ok;
  std::string out_dir;  // empty when nothing was written
  std::string message;
};

// Runs one experiment kind into a fresh content-addressed directory
// <out_root>/<kind>-<config hash>[-k]. Never overwrites an existing run.
// Module errors are mapped to exit codes: configuration/gate failures 2,
// numerical failures 3.
RunResult run_experiment(const std::string& kind, const RegimeSpec& spec, const RunOptions& opt);

}  // namespace rmf::experiments
