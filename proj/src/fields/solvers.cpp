#include "rmf/fields/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"

namespace rmf::fields {

namespace {

constexpr double kDecayTolerance = 1e-12;
constexpr double kBoundaryRatio = 1e-8;
constexpr double kNegativeTolerance = 1e-8;

std::size_t step_count(double span, double dt, const char* who) {
  if (!(dt > 0.0)) throw DomainError(std::string(who) + ": dt must be positive");
  if (span < 0.0) throw DomainError(std::string(who) + ": negative time span");
  const double n = std::round(span / dt);
  if (std::abs(n * dt - span) > 1e-9 * std::max(1.0, span)) {
    throw DomainError(std::string(who) + ": time span is not a multiple of dt");
  }
  return static_cast<std::size_t>(n);
}

void require_finite(const std::vector<double>& v, std::size_t step, const char* who) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string(who) + ": non-finite value at step " + std::to_string(step));
  }
}

// Per-mode factors shared by every solver: implicit diffusion and dealiasing.
struct Multipliers {
  std::vector<double> heat;
  std::vector<double> dealias;

  Multipliers(const Spectral& sp, const PdeConfig& cfg) : heat(sp.spectral_size()), dealias(sp.spectral_size()) {
    for (std::size_t q = 0; q < heat.size(); ++q) {
      const double k = sp.wavenumber(q);
      heat[q] = 1.0 / (1.0 + cfg.sigma * cfg.dt * k * k);
      dealias[q] = (!cfg.dealias || sp.kept_by_dealias(q)) ? 1.0 : 0.0;
    }
  }
};

VectorField drift_of(const Spectral& sp, const GridKernel& K, const GridField& u, double kappa) {
  VectorField a = convolve_gradient(sp, K, u);
  for (auto& c : a.comp)
    for (double& v : c) v *= kappa;
  return a;
}

// D div(g) in spectral space.
std::vector<cplx> dealiased_divergence(const Spectral& sp, const Multipliers& m,
                                       const std::array<std::vector<double>, 3>& g) {
  std::vector<cplx> out(sp.spectral_size(), cplx{0.0, 0.0});
  std::vector<cplx> gh(sp.spectral_size());
  for (int c = 0; c < 3; ++c) {
    sp.forward(g[c].data(), gh.data());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += sp.derivative_symbol(q, c) * gh[q];
  }
  for (std::size_t q = 0; q < out.size(); ++q) out[q] *= m.dealias[q];
  return out;
}

double max_speed(const VectorField& a) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.comp[0].size(); ++n) {
    m = std::max(m, std::sqrt(a.comp[0][n] * a.comp[0][n] + a.comp[1][n] * a.comp[1][n] + a.comp[2][n] * a.comp[2][n]));
  }
  return m;
}

void check_cfl(const VectorField& a, const PdeConfig& cfg, std::size_t step) {
  const double speed = max_speed(a);
  const double h = a.box.h();
  if (cfg.dt * speed / h > cfg.cfl_limit) {
    throw CflError("CFL violated at step " + std::to_string(step) + ": dt*max|drift|/h = " +
                       std::to_string(cfg.dt * speed / h),
                   0.9 * cfg.cfl_limit * h / speed);
  }
}

struct Checkpoint {
  std::size_t index;
  double theta;
};

Checkpoint locate_time(const Trajectory& traj, double t, const char* who) {
  if (traj.times.empty()) throw DomainError(std::string(who) + ": empty trajectory");
  const double span = traj.times.back();
  const double tol = 1e-9 * std::max(1.0, span);
  if (t < -tol || t > span + tol) throw DomainError(std::string(who) + ": time outside trajectory span");
  if (traj.times.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t + tol);
  std::size_t j = it == traj.times.begin() ? 0 : static_cast<std::size_t>(it - traj.times.begin()) - 1;
  if (j + 1 >= traj.times.size()) return {traj.times.size() - 1, 0.0};
  const double theta = (t - traj.times[j]) / (traj.times[j + 1] - traj.times[j]);
  if (std::abs(theta) <= tol / (traj.times[j + 1] - traj.times[j])) return {j, 0.0};
  return {j, std::clamp(theta, 0.0, 1.0)};
}

std::vector<double> blend(const std::vector<double>& a, const std::vector<double>& b, double theta) {
  if (theta == 0.0) return a;
  std::vector<double> out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = (1.0 - theta) * a[n] + theta * b[n];
  return out;
}

void require_drift(const Trajectory& traj, const GridKernel& K, const char* who) {
  require_same_box(traj.box, K.box(), who);
  if (traj.drift_fields.size() != traj.fields.size()) {
    throw DomainError(std::string(who) + ": base trajectory has no drift fields");
  }
  if (traj.kernel_name != K.name()) {
    throw DomainError(std::string(who) + ": base trajectory was computed with kernel '" + traj.kernel_name +
                      "', not '" + K.name() + "'");
  }
}

}  // namespace

Trajectory solve_nonlocal(const GridField& u0, const Spectral& sp, const GridKernel& K, const PdeConfig& cfg) {
  require_same_box(u0.box, sp.box(), "solve_nonlocal");
  require_same_box(u0.box, K.box(), "solve_nonlocal");
  if (!(cfg.sigma > 0.0)) throw DomainError("solve_nonlocal: sigma must be positive");
  if (cfg.save_every == 0) throw DomainError("solve_nonlocal: save_every must be >= 1");
  if (field_min(u0) < 0.0) throw DomainError("solve_nonlocal: initial density has negative values");
  if (std::abs(quadrature(u0) - 1.0) > 1e-10) throw DomainError("solve_nonlocal: initial density must have mass 1");
  if (boundary_shell_max(u0) > kDecayTolerance) {
    throw DomainError("solve_nonlocal: initial density not decayed at the box boundary; enlarge L");
  }
  const std::size_t steps = step_count(cfg.T_end, cfg.dt, "solve_nonlocal");
  const Multipliers m(sp, cfg);

  Trajectory traj(u0.box);
  traj.dt = cfg.dt;
  traj.stride = cfg.save_every;
  traj.kernel_name = cfg.interaction ? K.name() : "none";

  GridField u = u0;
  std::vector<cplx> uh(sp.spectral_size());
  std::array<std::vector<double>, 3> flux;
  for (auto& f : flux) f.resize(u.values.size());

  for (std::size_t n = 0;; ++n) {
    u.time = static_cast<double>(n) * cfg.dt;
    VectorField a = cfg.interaction ? drift_of(sp, K, u, cfg.kappa) : VectorField(u.box, u.time);
    a.time = u.time;

    if (n % cfg.save_every == 0 || n == steps) {
      const double mx = field_max(u);
      const double ratio = field_min(u) / mx;
      traj.worst_negative_ratio = std::min(traj.worst_negative_ratio, ratio);
      if (ratio < -kNegativeTolerance) ++traj.positivity_violations;
      traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(quadrature(u) - 1.0));
      traj.times.push_back(u.time);
      traj.fields.push_back(u);
      traj.drift_fields.push_back(a);
    }
    if (n == steps) break;

    if (cfg.interaction) check_cfl(a, cfg, n);
    sp.forward(u.values.data(), uh.data());
    if (cfg.interaction) {
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < u.values.size(); ++i) flux[c][i] = u[i] * a.comp[c][i];
      const auto div = dealiased_divergence(sp, m, flux);
      for (std::size_t q = 0; q < uh.size(); ++q) uh[q] -= cfg.dt * div[q];
    }
    for (std::size_t q = 0; q < uh.size(); ++q) uh[q] *= m.heat[q];
    sp.inverse(uh.data(), u.values.data());
    require_finite(u.values, n + 1, "solve_nonlocal");
  }

  if (traj.positivity_violations > 0) {
    spdlog::warn("density went negative beyond {:.1e} of its maximum at {} checkpoint(s); worst min/max = {:.3e}",
                 kNegativeTolerance, traj.positivity_violations, traj.worst_negative_ratio);
  }
  if (traj.max_mass_drift > 1e-10) spdlog::warn("mass drift {:.3e} exceeds 1e-10", traj.max_mass_drift);
  // Relative: the dealiased drift leaves ~1e-10 ringing on the boundary shell.
  const double edge = boundary_shell_max(traj.fields.back());
  if (edge > kBoundaryRatio * field_max(traj.fields.back())) {
    spdlog::warn("density reached the box boundary (max {:.3e}); periodic images are no longer negligible", edge);
  }
  return traj;
}

Trajectory solve_intermediate(const GridField& u0, const kernels::RadialKernelSet& ks, const PdeConfig& cfg) {
  const Spectral sp(u0.box);
  return solve_nonlocal(u0, sp, GridKernel::intermediate(sp, ks), cfg);
}

Trajectory solve_limit(const GridField& u0, const kernels::RieszParams& params, const PdeConfig& cfg) {
  const Spectral sp(u0.box);
  return solve_nonlocal(u0, sp, GridKernel::riesz(sp, params), cfg);
}

GridField solve_linearized(const GridField& f0, double s0, double t, const Trajectory& u_traj, const Spectral& sp,
                           const GridKernel& K, const PdeConfig& cfg) {
  require_same_box(f0.box, sp.box(), "solve_linearized");
  if (cfg.interaction) require_drift(u_traj, K, "solve_linearized");
  const std::size_t n0 = step_count(s0, cfg.dt, "solve_linearized");
  const std::size_t n1 = step_count(t, cfg.dt, "solve_linearized");
  if (n1 < n0) throw DomainError("solve_linearized: t < s0");
  const Multipliers m(sp, cfg);

  GridField f = f0;
  std::vector<cplx> fh(sp.spectral_size());
  std::array<std::vector<double>, 3> g;
  for (auto& c : g) c.resize(f.values.size());

  for (std::size_t n = n0; n < n1; ++n) {
    const double tn = static_cast<double>(n) * cfg.dt;
    sp.forward(f.values.data(), fh.data());
    if (cfg.interaction) {
      const GridField u = density_at(u_traj, tn, TimeBlend::linear);
      const VectorField a = drift_at(u_traj, tn, TimeBlend::linear);
      const VectorField gk = convolve_gradient(sp, K, f);
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f.values.size(); ++i)
          g[c][i] = f[i] * a.comp[c][i] + cfg.kappa * u[i] * gk.comp[c][i];
      const auto div = dealiased_divergence(sp, m, g);
      for (std::size_t q = 0; q < fh.size(); ++q) fh[q] -= cfg.dt * div[q];
    }
    for (std::size_t q = 0; q < fh.size(); ++q) fh[q] *= m.heat[q];
    sp.inverse(fh.data(), f.values.data());
    require_finite(f.values, n + 1, "solve_linearized");
  }
  f.time = t;
  return f;
}

Trajectory solve_backward_dual(const GridField& phi, double t, const Trajectory& u_traj, const Spectral& sp,
                               const GridKernel& K, const PdeConfig& cfg) {
  require_same_box(phi.box, sp.box(), "solve_backward_dual");
  if (cfg.interaction) require_drift(u_traj, K, "solve_backward_dual");
  const std::size_t n1 = step_count(t, cfg.dt, "solve_backward_dual");
  const Multipliers m(sp, cfg);
  const std::size_t size = phi.values.size();

  std::vector<GridField> rev;  // T(t), T(t - dt), ..., T(0)
  rev.reserve(n1 + 1);
  GridField w = phi;
  w.time = t;
  rev.push_back(w);

  std::vector<cplx> wh(sp.spectral_size()), gh(sp.spectral_size());
  std::array<std::vector<double>, 3> grad;
  for (auto& c : grad) c.resize(size);
  std::vector<double> hw(size), prod(size), conv(size);

  for (std::size_t k = 0; k < n1; ++k) {
    const std::size_t n = n1 - 1 - k;
    const double tn = static_cast<double>(n) * cfg.dt;
    sp.forward(w.values.data(), wh.data());
    for (std::size_t q = 0; q < wh.size(); ++q) wh[q] *= m.heat[q];
    sp.inverse(wh.data(), hw.data());
    if (cfg.interaction) {
      const GridField u = density_at(u_traj, tn, TimeBlend::linear);
      const VectorField a = drift_at(u_traj, tn, TimeBlend::linear);
      // grad(D H w)
      for (int c = 0; c < 3; ++c) {
        for (std::size_t q = 0; q < wh.size(); ++q) gh[q] = wh[q] * m.dealias[q] * sp.derivative_symbol(q, c);
        sp.inverse(gh.data(), grad[c].data());
      }
      std::vector<double> bt(size, 0.0);
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < size; ++i) bt[i] += a.comp[c][i] * grad[c][i];
      for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < size; ++i) prod[i] = u[i] * grad[c][i];
        sp.forward(prod.data(), gh.data());
        const auto& gm = K.grad_multiplier(c);
        for (std::size_t q = 0; q < gh.size(); ++q) gh[q] *= gm[q];
        sp.inverse(gh.data(), conv.data());
        for (std::size_t i = 0; i < size; ++i) bt[i] -= cfg.kappa * conv[i];
      }
      for (std::size_t i = 0; i < size; ++i) w[i] = hw[i] + cfg.dt * bt[i];
    } else {
      w.values = hw;
    }
    require_finite(w.values, k + 1, "solve_backward_dual");
    w.time = tn;
    rev.push_back(w);
  }

  Trajectory out(phi.box);
  out.dt = cfg.dt;
  out.stride = 1;
  out.kernel_name = "dual";
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    out.times.push_back(it->time);
    out.fields.push_back(std::move(*it));
  }
  return out;
}

GridField density_at(const Trajectory& traj, double t, TimeBlend blend_mode) {
  const auto c = locate_time(traj, t, "density_at");
  std::size_t j = c.index;
  double theta = c.theta;
  if (blend_mode == TimeBlend::nearest && theta > 0.0) {
    if (theta >= 0.5) ++j;
    theta = 0.0;
  }
  GridField out(traj.box, t);
  out.values = theta == 0.0 ? traj.fields[j].values : blend(traj.fields[j].values, traj.fields[j + 1].values, theta);
  return out;
}

VectorField drift_at(const Trajectory& traj, double t, TimeBlend blend_mode) {
  if (traj.drift_fields.size() != traj.fields.size()) throw DomainError("drift_at: trajectory has no drift fields");
  const auto c = locate_time(traj, t, "drift_at");
  std::size_t j = c.index;
  double theta = c.theta;
  if (blend_mode == TimeBlend::nearest && theta > 0.0) {
    if (theta >= 0.5) ++j;
    theta = 0.0;
  }
  VectorField out(traj.box, t);
  for (int a = 0; a < 3; ++a) {
    out.comp[a] = theta == 0.0 ? traj.drift_fields[j].comp[a]
                               : blend(traj.drift_fields[j].comp[a], traj.drift_fields[j + 1].comp[a], theta);
  }
  return out;
}

std::vector<double> lp_series(const Trajectory& traj, double p) {
  std::vector<double> out;
  out.reserve(traj.fields.size());
  for (const auto& f : traj.fields) out.push_back(lp_norm(f, p));
  return out;
}

}  // namespace rmf::fields
