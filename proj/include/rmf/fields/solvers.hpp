#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rmf/fields/grid.hpp"
#include "rmf/fields/grid_kernel.hpp"
#include "rmf/fields/spectral.hpp"

namespace rmf::fields {

struct PdeConfig {
  double sigma = 0.25;
  double kappa = 1.0;
  double dt = 0.01;
  double T_end = 0.5;
  bool dealias = true;
  std::size_t save_every = 1;
  // false drops the kappa term entirely (heat equation).
  bool interaction = true;
  // Largest admissible dt max|drift| / h.
  double cfl_limit = 0.5;
};

// Checkpointed density and its drift kappa (grad K) * u.
struct Trajectory {
  explicit Trajectory(const Box& b) : box(b) {}

  Box box;
  double dt = 0.0;
  std::size_t stride = 1;
  std::string kernel_name;
  std::vector<double> times;
  std::vector<GridField> fields;
  std::vector<VectorField> drift_fields;

  std::size_t positivity_violations = 0;
  // min over the run of min(u) / max(u).
  double worst_negative_ratio = 0.0;
  double max_mass_drift = 0.0;

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

// du/dt = sigma lap u - div(u a), a = kappa (grad K) * u, first-order IMEX:
//   u^{n+1} = H (u^n - dt D div(u^n a^n)),  H = (1 + sigma dt k^2)^{-1},
// D the 2/3 dealiasing mask. Throws CflError or NumericalError (with step).
Trajectory solve_nonlocal(const GridField& u0, const Spectral& sp, const GridKernel& K, const PdeConfig& cfg);

Trajectory solve_intermediate(const GridField& u0, const kernels::RadialKernelSet& ks, const PdeConfig& cfg);
Trajectory solve_limit(const GridField& u0, const kernels::RieszParams& params, const PdeConfig& cfg);

// Linearized forward equation df/dt = sigma lap f - div(f a + kappa u (grad K)*f)
// from s0 to t about the base trajectory, stepped as
//   f^{n+1} = H (I + dt B_n) f^n.
GridField solve_linearized(const GridField& f0, double s0, double t, const Trajectory& u_traj, const Spectral& sp,
                           const GridKernel& K, const PdeConfig& cfg);

// Backward dual T_phi^t(s), s in [0, t], as the exact discrete adjoint of
// solve_linearized: w(s) = v(t - s) advanced by w <- (I + dt B_n^T) H w with
//   B^T v = a . grad(D v) - kappa (grad K)* . (u grad(D v)).
// times[] are the s values in increasing order, fields[j] = T_phi^t(times[j]).
Trajectory solve_backward_dual(const GridField& phi, double t, const Trajectory& u_traj, const Spectral& sp,
                               const GridKernel& K, const PdeConfig& cfg);

enum class TimeBlend { nearest, linear };

GridField density_at(const Trajectory& traj, double t, TimeBlend blend = TimeBlend::linear);
VectorField drift_at(const Trajectory& traj, double t, TimeBlend blend = TimeBlend::nearest);

// ||u(t_j)||_p at every checkpoint.
std::vector<double> lp_series(const Trajectory& traj, double p);

}  // namespace rmf::fields
