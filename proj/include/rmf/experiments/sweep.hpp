#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "rmf/experiments/regime.hpp"
#include "rmf/fields/grid_kernel.hpp"
#include "rmf/fields/solvers.hpp"
#include "rmf/fields/spectral.hpp"
#include "rmf/particles/ensemble.hpp"
#include "rmf/particles/pair_kernel.hpp"
#include "rmf/statistics/csv.hpp"
#include "rmf/statistics/estimators.hpp"
#include "rmf/statistics/fluctuations.hpp"

namespace rmf::experiments {

// Shared, immutable inputs of all realizations at one N: kernel set at
// eta = N^-beta, its pair table, the truncated grid kernel and the
// intermediate PDE trajectory with one checkpoint per step.
struct NContext {
  NContext(const RegimeSpec& spec, std::size_t N, double T_end);

  std::size_t N;
  double eta;
  fields::Box box;
  std::unique_ptr<fields::Spectral> sp;
  std::unique_ptr<kernels::RadialKernelSet> ks;
  std::unique_ptr<particles::PairKernel> pk;
  std::unique_ptr<fields::GridKernel> K;
  std::unique_ptr<fields::Trajectory> traj;

  particles::EnsembleConfig ensemble_config(const RegimeSpec& spec, std::uint64_t realization, double T_end) const;
};

struct SweepOptions {
  bool errors = true;    // l2 / h1 functionals at every step
  bool coupling = true;  // coupling distance (always recorded by run_coupled)
  bool lln = true;       // LLN sets every lln_every steps
  double T_end = -1.0;   // < 0: the spec's T_end
  // Position snapshots every spec.save_every steps are written here as
  // <dir>/N<N>-r<realization>-<X|Xbar>.f64 when both are set.
  std::string snapshot_dir;
};

struct NSummary {
  std::size_t N = 0;
  double eta = 0.0;
  std::string kernel_hash;
  std::vector<double> rate_stats;        // per realization
  std::vector<double> l2_t0;             // ||f - g||^2 at t = 0 per realization
  std::vector<double> coupling_sup;      // per realization
  std::vector<double> lln_b_sup;         // per realization: max B deviation over checkpoints
  std::vector<std::size_t> alpha_exceed;  // per alpha: realizations with sup > N^-alpha
  std::vector<std::size_t> theta_exceed;  // per theta: realizations hitting the B set at some checkpoint
  std::vector<std::size_t> theta_exceed_a;  // same for the A set
  std::size_t truncation_warnings = 0;
  std::size_t negative_flags = 0;
  std::size_t positivity_violations = 0;
  double pde_mass_drift = 0.0;
};

// Coupled runs for every N in spec.N_list and realizations
// realization_offset .. realization_offset + R - 1, in order. Rows go to
// csv (run_id = <prefix>N<N>) when given.
std::vector<NSummary> run_sweep(const RegimeSpec& spec, const SweepOptions& opt, statistics::CsvWriter* csv,
                                const std::string& run_prefix);

// Test functions selected by spec.phi.
std::vector<statistics::TestFunction> selected_test_functions(const RegimeSpec& spec);

struct CltTarget {
  std::string phi_id;
  double t = 0.0;
  statistics::CltVariance limit;         // dual about the limit u, Riesz kernel
  statistics::CltVariance intermediate;  // dual about ubar^eta, truncated kernel
  double primary = 0.0;                  // per spec.clt_dual
};

struct CltCell {
  std::size_t N = 0;
  std::string kernel_hash;
  std::string phi_id;
  double t = 0.0;
  std::vector<double> samples;
  CltTarget target;
  statistics::NormalityReport report;
};

// <F^eta(t), phi> over R realizations for every N, phi and t in clt_times,
// with targets from the backward dual.
std::vector<CltCell> run_clt(const RegimeSpec& spec, statistics::CsvWriter* csv, const std::string& run_prefix);

}  // namespace rmf::experiments
