#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmf/fields/initial_density.hpp"
#include "rmf/kernels/riesz.hpp"

namespace rmf::experiments {

// Everything an experiment depends on. The config file is flat
// `key = value` text; see README for the key list.
struct RegimeSpec {
  int d = 3;
  double lambda = 0.5;
  double beta = 0.05;
  std::vector<double> alpha_list{0.3};
  std::vector<double> theta_list{0.3};
  double sigma = 0.25;
  double kappa = 1.0;
  std::vector<std::size_t> N_list{500, 1000, 2000, 4000};
  std::size_t R = 50;
  double T_end = 0.5;
  double dt = 0.01;
  double L = 16.0;
  std::size_t M = 64;
  std::vector<fields::GaussianComponent> u0{{1.0, {0.0, 0.0, 0.0}, 1.0}};
  std::uint64_t seed = 20240607;

  std::uint64_t realization_offset = 0;
  std::string pde_kernel = "truncated";  // truncated | intermediate | limit
  std::vector<double> clt_times{0.5};
  std::string clt_dual = "limit";  // limit | intermediate
  std::string phi = "default";     // comma-separated ids from the default set, or "default"
  std::size_t lln_every = 10;
  std::size_t save_every = 0;
  std::size_t kernel_nodes = 4096;
  // kernel-verify only.
  std::vector<std::size_t> scaling_N_list{1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072, 262144};

  kernels::RieszParams riesz() const { return kernels::RieszParams(d, lambda); }
  fields::InitialDensity initial_density() const;
  double eta(std::size_t N) const;
};

// Throws ConfigError with the offending line on unknown keys or bad values.
RegimeSpec parse_config(const std::string& text);
RegimeSpec load_config(const std::string& path);

// Sorted keys, %.17g numbers; parse(canonical(s)) reproduces s and
// canonical(parse(canonical(s))) == canonical(s).
std::string canonical(const RegimeSpec& spec);
std::string config_hash(const RegimeSpec& spec);

struct GateReport {
  bool lambda_ok = false;  // 0 < lambda < d - 2
  bool thm_prob = false;   // beta < 1/(4 lambda + 12)
  double thm_prob_bound = 0.0;
  double alpha_lo = 0.0, alpha_hi = 0.0;
  std::vector<bool> alpha_ok;
  bool thm_l2 = false;  // beta < 1/(8 lambda + 12)
  double thm_l2_bound = 0.0;
  std::vector<bool> theta_ok;  // theta in (0, 1/2)
  double p_star = 0.0;
  double u0_norm = 0.0;    // ||u0||_{p*} on the grid
  double threshold = 0.0;  // diagnostic C(p*)
  std::vector<double> etas;

  bool all_alpha() const;
  bool all_theta() const;
  // Gates required by an experiment kind.
  bool admits(const std::string& kind) const;
};

GateReport validate_regime(const RegimeSpec& spec);
std::string format_report(const RegimeSpec& spec, const GateReport& g);

}  // namespace rmf::experiments
