#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rmf/core/errors.hpp"
#include "rmf/experiments/regime.hpp"
#include "rmf/experiments/runner.hpp"

using namespace rmf::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Regularized mean-field particle experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_root = "out";
  int threads = 0;
  bool force = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "regime config file (key = value)");
    sub->add_option("--out,-o", out_root, "output root directory")->capture_default_str();
    sub->add_option("--threads,-j", threads, "OpenMP threads (0 = default)");
    sub->add_flag("--force", force, "run even when a theorem gate fails");
    sub->add_flag("--quiet,-q", quiet, "warnings only");
  };

  auto* validate = app.add_subcommand("validate-regime", "check the theorem gates for a config");
  add_common(validate);
  const std::map<std::string, std::string> about{
      {"kernel-build", "tabulate V^eta for every N and export the tables"},
      {"kernel-verify", "fit the sup-norm scaling slopes of V^eta, its derivatives and Z^eta"},
      {"pde-run", "solve the intermediate (or limit) PDE and record norms and mass"},
      {"dual-run", "solve the backward dual and tabulate the CLT variance"},
      {"couple-run", "coupled particle systems: coupling distance per step"},
      {"lln", "law-of-large-numbers set exceedances"},
      {"rate", "mean-square error sweep over N with a bootstrap rate fit"},
      {"clt", "fluctuation pairings and normality reports"}};
  for (const auto& kind : experiment_kinds()) add_common(app.add_subcommand(kind, about.at(kind)));

  CLI11_PARSE(app, argc, argv);
  if (quiet) spdlog::set_level(spdlog::level::warn);

  RegimeSpec spec;
  try {
    if (!config_path.empty()) spec = load_config(config_path);
  } catch (const rmf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  if (kind == "validate-regime") {
    try {
      const auto g = validate_regime(spec);
      std::cout << format_report(spec, g);
      return g.admits(kind) ? exit_ok : exit_config;
    } catch (const rmf::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_config;
    }
  }

  RunOptions opt;
  opt.out_root = out_root;
  opt.force = force;
  opt.threads = threads;
  opt.config_path = config_path;
  const auto res = run_experiment(kind, spec, opt);
  (res.exit_code == exit_ok ? std::cout : std::cerr) << res.message;
  if (!res.out_dir.empty()) std::cout << "output: " << res.out_dir << "\n";
  return res.exit_code;
}
