#include "rmf/particles/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "rmf/core/counter_rng.hpp"
#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"

namespace rmf::particles {

double EnsembleConfig::eta() const { return std::pow(static_cast<double>(N), -beta); }

namespace {

inline double min_image(double d, double L) {
  if (d >= 0.5 * L) return d - L;
  if (d < -0.5 * L) return d + L;
  return d;
}

void check_config(const EnsembleConfig& cfg) {
  if (cfg.N < 1) throw DomainError("ensemble: N must be >= 1");
  if (!(cfg.dt > 0.0)) throw DomainError("ensemble: dt must be positive");
  if (!(cfg.sigma >= 0.0)) throw DomainError("ensemble: sigma must be nonnegative");
  if (cfg.N > 0xffffffffULL) throw DomainError("ensemble: N exceeds the RNG counter width");
}

}  // namespace

CoupledEnsemble init_ensemble(const EnsembleConfig& cfg, const fields::InitialDensity& init) {
  check_config(cfg);
  const CounterRng rng(cfg.seed, cfg.realization);
  CoupledEnsemble ens;
  ens.X = ParticleArray(cfg.N);
  for (std::size_t i = 0; i < cfg.N; ++i) {
    const auto a = static_cast<std::uint32_t>(i);
    const double u = rng.uniform(Stream::component_choice, a, 0);
    const Vec3 g = rng.normal3(Stream::initial_position, a, 0);
    ens.X.set(i, wrap(init.transform(u, g), cfg.L));
  }
  ens.Xbar = ens.X;
  ens.dx.assign(cfg.N, 0.0);
  ens.dy.assign(cfg.N, 0.0);
  ens.dz.assign(cfg.N, 0.0);
  return ens;
}

void pairwise_drift(const ParticleArray& X, const PairKernel& pk, double kappa, double L, ParticleArray& out) {
  const std::size_t N = X.size();
  if (out.size() != N) out = ParticleArray(N);
  const double scale = kappa / static_cast<double>(N);
  const double* px = X.x.data();
  const double* py = X.y.data();
  const double* pz = X.z.data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) {
    const double xi = px[i], yi = py[i], zi = pz[i];
    double bx = 0.0, by = 0.0, bz = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const double dx = min_image(xi - px[j], L);
      const double dy = min_image(yi - py[j], L);
      const double dz = min_image(zi - pz[j], L);
      const double g = pk.g(dx * dx + dy * dy + dz * dz);
      bx += g * dx;
      by += g * dy;
      bz += g * dz;
    }
    out.x[i] = scale * bx;
    out.y[i] = scale * by;
    out.z[i] = scale * bz;
  }
}

void meanfield_drift(const ParticleArray& Xbar, const fields::VectorField& drift, ParticleArray& out) {
  const std::size_t N = Xbar.size();
  if (out.size() != N) out = ParticleArray(N);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) out.set(i, fields::sample_trilinear(drift, Xbar[i]));
}

void em_step(CoupledEnsemble& ens, const EnsembleConfig& cfg, const PairKernel& pk, const fields::VectorField& drift) {
  const std::size_t N = ens.X.size();
  ParticleArray b(N), bbar(N);
  if (cfg.interaction) {
    pairwise_drift(ens.X, pk, cfg.kappa, cfg.L, b);
    meanfield_drift(ens.Xbar, drift, bbar);
  }
  const CounterRng rng(cfg.seed, cfg.realization);
  const double amp = std::sqrt(2.0 * cfg.sigma * cfg.dt);
  const auto n = static_cast<std::uint32_t>(ens.step);
  bool finite = true;
#pragma omp parallel for schedule(static) reduction(&& : finite)
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 G = amp * rng.normal3(Stream::brownian, static_cast<std::uint32_t>(i), n);
    const Vec3 step_x = cfg.dt * b[i] + G;
    const Vec3 step_bar = cfg.dt * bbar[i] + G;
    const Vec3 x = ens.X[i] + step_x;
    const Vec3 xb = ens.Xbar[i] + step_bar;
    finite = finite && std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z) && std::isfinite(xb.x) &&
             std::isfinite(xb.y) && std::isfinite(xb.z);
    ens.X.set(i, wrap(x, cfg.L));
    ens.Xbar.set(i, wrap(xb, cfg.L));
    ens.dx[i] += step_bar.x;
    ens.dy[i] += step_bar.y;
    ens.dz[i] += step_bar.z;
  }
  if (!finite) {
    throw NumericalError("em_step: non-finite particle position at step " + std::to_string(ens.step) +
                         " (realization " + std::to_string(cfg.realization) + ")");
  }
  ++ens.step;
  ens.t = static_cast<double>(ens.step) * cfg.dt;
}

double coupling_distance(const CoupledEnsemble& ens, double L) {
  double m = 0.0;
  for (std::size_t i = 0; i < ens.X.size(); ++i) {
    const double dx = min_image(ens.X.x[i] - ens.Xbar.x[i], L);
    const double dy = min_image(ens.X.y[i] - ens.Xbar.y[i], L);
    const double dz = min_image(ens.X.z[i] - ens.Xbar.z[i], L);
    m = std::max(m, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  return m;
}

CouplingRecord run_coupled(const EnsembleConfig& cfg, const fields::InitialDensity& init, const PairKernel& pk,
                           const fields::Trajectory& ubar, const Observer& observer) {
  check_config(cfg);
  if (cfg.interaction && std::abs(pk.eta() - cfg.eta()) > 1e-12 * cfg.eta()) {
    throw DomainError("run_coupled: kernel eta does not match N^-beta");
  }
  if (std::abs(ubar.box.L() - cfg.L) > 0.0) throw DomainError("run_coupled: box side differs from the PDE box");
  const double steps_d = std::round(cfg.T_end / cfg.dt);
  if (std::abs(steps_d * cfg.dt - cfg.T_end) > 1e-9) throw DomainError("run_coupled: T_end is not a multiple of dt");
  const auto steps = static_cast<std::size_t>(steps_d);
  if (cfg.interaction && ubar.t_end() < cfg.T_end - 1e-9) throw DomainError("run_coupled: PDE trajectory too short");

  // Drift checkpoint index for every step.
  std::vector<std::size_t> slot(steps + 1, 0);
  if (cfg.interaction) {
    for (std::size_t n = 0; n <= steps; ++n) {
      const double t = static_cast<double>(n) * cfg.dt;
      const auto it = std::lower_bound(ubar.times.begin(), ubar.times.end(), t - 1e-9);
      if (it == ubar.times.end() || std::abs(*it - t) > 1e-9) {
        throw DomainError("run_coupled: dt does not match the PDE checkpoint stride");
      }
      slot[n] = static_cast<std::size_t>(it - ubar.times.begin());
    }
  }

  CouplingRecord rec;
  rec.alpha_list = cfg.alpha_list;
  CoupledEnsemble ens = init_ensemble(cfg, init);
  const fields::VectorField zero(ubar.box);
  std::vector<bool> flagged(cfg.N, false);
  double sup = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double d = coupling_distance(ens, cfg.L);
    sup = std::max(sup, d);
    rec.times.push_back(ens.t);
    rec.max_distance.push_back(d);
    rec.running_sup.push_back(sup);
    if (observer) observer(n, ens.t, ens);
    if (cfg.save_every > 0 && (n % cfg.save_every == 0 || n == steps)) {
      rec.snapshot_times.push_back(ens.t);
      rec.snapshot_X.push_back(ens.X);
      rec.snapshot_Xbar.push_back(ens.Xbar);
    }
    if (n == steps) break;
    em_step(ens, cfg, pk, cfg.interaction ? ubar.drift_fields[slot[n]] : zero);
    for (std::size_t i = 0; i < cfg.N; ++i) {
      if (!flagged[i] && std::max({std::abs(ens.dx[i]), std::abs(ens.dy[i]), std::abs(ens.dz[i])}) > 0.25 * cfg.L) {
        flagged[i] = true;
        ++rec.truncation_warnings;
      }
    }
  }
  for (double a : cfg.alpha_list) rec.exceeded.push_back(sup > std::pow(static_cast<double>(cfg.N), -a));
  if (rec.truncation_warnings > 0) {
    spdlog::warn("realization {}: {} particle(s) moved more than L/4 from their start", cfg.realization,
                 rec.truncation_warnings);
  }
  return rec;
}

}  // namespace rmf::particles
