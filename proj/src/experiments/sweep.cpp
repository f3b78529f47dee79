#include "rmf/experiments/sweep.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"
#include "rmf/fields/trajectory_io.hpp"
#include "rmf/kernels/kernel_io.hpp"
#include "rmf/statistics/error_functionals.hpp"

namespace rmf::experiments {

using statistics::CsvWriter;

namespace {

fields::PdeConfig pde_config(const RegimeSpec& spec, double T_end) {
  fields::PdeConfig pc;
  pc.sigma = spec.sigma;
  pc.kappa = spec.kappa;
  pc.dt = spec.dt;
  pc.T_end = T_end;
  pc.interaction = spec.kappa != 0.0;
  return pc;
}

std::size_t step_index(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

// Interleaved x, y, z per particle, snapshots back to back.
void write_snapshots(const std::string& dir, std::size_t N, std::uint64_t r, const particles::CouplingRecord& rec) {
  auto dump = [&](const std::vector<particles::ParticleArray>& snaps, const char* tag) {
    std::vector<double> buf;
    buf.reserve(snaps.size() * N * 3);
    for (const auto& P : snaps)
      for (std::size_t i = 0; i < P.size(); ++i) buf.insert(buf.end(), {P.x[i], P.y[i], P.z[i]});
    const std::string name = "N" + std::to_string(N) + "-r" + std::to_string(r) + "-" + tag + ".f64";
    fields::write_f64(std::filesystem::path(dir) / name, buf.data(), buf.size());
  };
  dump(rec.snapshot_X, "X");
  dump(rec.snapshot_Xbar, "Xbar");
}

}  // namespace

NContext::NContext(const RegimeSpec& spec, std::size_t N_, double T_end)
    : N(N_), eta(spec.eta(N_)), box(spec.L, spec.M) {
  if (spec.d != 3) throw ConfigError("numerics are implemented for d = 3 only");
  sp = std::make_unique<fields::Spectral>(box);
  kernels::TableConfig tc;
  tc.nodes = spec.kernel_nodes;
  ks = std::make_unique<kernels::RadialKernelSet>(
      kernels::build_kernel_set(spec.riesz(), eta, kernels::MollifierProfile::standard_bump(), tc));
  pk = std::make_unique<particles::PairKernel>(*ks, 3.0 * 0.25 * spec.L * spec.L);
  K = std::make_unique<fields::GridKernel>(fields::GridKernel::truncated(*sp, *ks));
  traj = std::make_unique<fields::Trajectory>(
      fields::solve_nonlocal(spec.initial_density().render(box), *sp, *K, pde_config(spec, T_end)));
}

particles::EnsembleConfig NContext::ensemble_config(const RegimeSpec& spec, std::uint64_t realization,
                                                    double T_end) const {
  particles::EnsembleConfig c;
  c.N = N;
  c.beta = spec.beta;
  c.sigma = spec.sigma;
  c.kappa = spec.kappa;
  c.dt = spec.dt;
  c.T_end = T_end;
  c.seed = spec.seed;
  c.realization = realization;
  c.L = spec.L;
  c.interaction = spec.kappa != 0.0;
  c.alpha_list = spec.alpha_list;
  c.save_every = 0;
  return c;
}

std::vector<NSummary> run_sweep(const RegimeSpec& spec, const SweepOptions& opt, CsvWriter* csv,
                                const std::string& run_prefix) {
  const double T_end = opt.T_end < 0.0 ? spec.T_end : opt.T_end;
  const auto init = spec.initial_density();
  std::vector<NSummary> out;
  for (std::size_t N : spec.N_list) {
    const NContext nc(spec, N, T_end);
    const std::string run_id = run_prefix + "N" + std::to_string(N);
    spdlog::info("{}: eta = {:.6g}, {} checkpoint(s), {} realization(s)", run_id, nc.eta, nc.traj->times.size(),
                 spec.R);

    std::vector<statistics::MeanFieldContext> ctx;
    if (opt.errors || opt.lln) {
      ctx.reserve(nc.traj->fields.size());
      for (const auto& u : nc.traj->fields) ctx.emplace_back(u, *nc.sp, *nc.K, *nc.pk);
    }

    NSummary sum;
    sum.N = N;
    sum.eta = nc.eta;
    sum.kernel_hash = kernels::kernel_set_hash(*nc.ks);
    sum.alpha_exceed.assign(spec.alpha_list.size(), 0);
    sum.theta_exceed.assign(spec.theta_list.size(), 0);
    sum.theta_exceed_a.assign(spec.theta_list.size(), 0);
    sum.positivity_violations = nc.traj->positivity_violations;
    sum.pde_mass_drift = nc.traj->max_mass_drift;

    for (std::uint64_t r = spec.realization_offset; r < spec.realization_offset + spec.R; ++r) {
      auto cfg = nc.ensemble_config(spec, r, T_end);
      const bool snapshots = !opt.snapshot_dir.empty() && spec.save_every > 0;
      if (snapshots) cfg.save_every = spec.save_every;
      statistics::ErrorSample es;
      es.realization = r;
      std::vector<bool> hit_b(spec.theta_list.size(), false), hit_a(spec.theta_list.size(), false);
      double b_sup = 0.0;
      const std::size_t last = step_index(T_end, spec.dt);

      auto observer = [&](std::size_t n, double t, const particles::CoupledEnsemble& ens) {
        if (opt.errors) {
          const auto e = statistics::error_functionals(ens.X, ctx[n], nc.eta);
          es.append(t, e);
          if (csv) {
            csv->sample(run_id, r, t, "l2_err_sq", e.l2);
            csv->sample(run_id, r, t, "h1_err_sq", e.h1);
          }
        }
        if (opt.lln && (n % spec.lln_every == 0 || n == last)) {
          // theta only moves the threshold; evaluate the deviations once.
          const auto l = statistics::lln_exceedance(ens.Xbar, ctx[n], spec.theta_list.front());
          b_sup = std::max(b_sup, l.b_deviation);
          for (std::size_t k = 0; k < spec.theta_list.size(); ++k) {
            const double thr = std::pow(static_cast<double>(N), -spec.theta_list[k]);
            if (l.b_deviation > thr) hit_b[k] = true;
            if (l.a_deviation > thr) hit_a[k] = true;
          }
          if (csv) {
            csv->sample(run_id, r, t, "lln_b_deviation", l.b_deviation);
            csv->sample(run_id, r, t, "lln_a_deviation", l.a_deviation);
          }
        }
      };
      const auto rec = particles::run_coupled(cfg, init, *nc.pk, *nc.traj, observer);
      if (snapshots) write_snapshots(opt.snapshot_dir, N, r, rec);

      if (csv && opt.coupling)
        for (std::size_t n = 0; n < rec.times.size(); ++n)
          csv->sample(run_id, r, rec.times[n], "coupling_max", rec.max_distance[n]);
      sum.coupling_sup.push_back(rec.running_sup.back());
      if (opt.lln) sum.lln_b_sup.push_back(b_sup);
      for (std::size_t k = 0; k < rec.exceeded.size(); ++k) sum.alpha_exceed[k] += rec.exceeded[k] ? 1 : 0;
      for (std::size_t k = 0; k < hit_b.size(); ++k) {
        sum.theta_exceed[k] += hit_b[k] ? 1 : 0;
        sum.theta_exceed_a[k] += hit_a[k] ? 1 : 0;
      }
      sum.truncation_warnings += rec.truncation_warnings;
      if (opt.errors) {
        sum.rate_stats.push_back(es.rate_statistic(spec.sigma));
        sum.l2_t0.push_back(es.l2_err_sq.front());
        sum.negative_flags += es.negative_flags;
        if (csv) csv->sample(run_id, r, T_end, "rate_statistic", sum.rate_stats.back());
      }
      if (csv) csv->sample(run_id, r, T_end, "coupling_sup", rec.running_sup.back());
    }
    if (csv) csv->flush();
    out.push_back(std::move(sum));
  }
  return out;
}

std::vector<statistics::TestFunction> selected_test_functions(const RegimeSpec& spec) {
  const auto all = statistics::TestFunction::default_set();
  if (spec.phi == "default") return all;
  std::vector<statistics::TestFunction> out;
  std::string cur;
  auto take = [&](const std::string& id) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& f) { return f.id() == id; });
    if (it == all.end()) throw ConfigError("phi: unknown test function '" + id + "'");
    out.push_back(*it);
  };
  for (char c : spec.phi + ",") {
    if (c == ',') {
      if (!cur.empty()) take(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (out.empty()) throw ConfigError("phi: no test functions selected");
  return out;
}

std::vector<CltCell> run_clt(const RegimeSpec& spec, CsvWriter* csv, const std::string& run_prefix) {
  const auto phis = selected_test_functions(spec);
  const double t_max = *std::max_element(spec.clt_times.begin(), spec.clt_times.end());
  const auto init = spec.initial_density();
  const fields::Box box(spec.L, spec.M);
  const fields::Spectral sp(box);
  const auto u0 = init.render(box);
  std::vector<fields::GridField> phi_grid;
  for (const auto& f : phis) phi_grid.push_back(f.render(box));

  // Limit targets do not depend on N.
  const auto pc = pde_config(spec, t_max);
  const auto limit_traj = fields::solve_limit(u0, spec.riesz(), pc);
  const auto K_limit = fields::GridKernel::riesz(sp, spec.riesz());
  std::vector<std::vector<statistics::CltVariance>> limit_var(phis.size());
  for (std::size_t p = 0; p < phis.size(); ++p)
    for (double t : spec.clt_times)
      limit_var[p].push_back(statistics::clt_target_variance(phi_grid[p], t, limit_traj, sp, K_limit, pc));

  std::vector<CltCell> cells;
  for (std::size_t N : spec.N_list) {
    const NContext nc(spec, N, t_max);
    const std::string run_id = run_prefix + "N" + std::to_string(N);
    const std::size_t first = cells.size();
    for (std::size_t p = 0; p < phis.size(); ++p) {
      for (std::size_t q = 0; q < spec.clt_times.size(); ++q) {
        CltCell c;
        c.N = N;
        c.kernel_hash = kernels::kernel_set_hash(*nc.ks);
        c.phi_id = phis[p].id();
        c.t = spec.clt_times[q];
        c.target.phi_id = c.phi_id;
        c.target.t = c.t;
        c.target.limit = limit_var[p][q];
        c.target.intermediate = statistics::clt_target_variance(phi_grid[p], c.t, *nc.traj, *nc.sp, *nc.K, pc);
        c.target.primary = spec.clt_dual == "limit" ? c.target.limit.total() : c.target.intermediate.total();
        cells.push_back(std::move(c));
      }
    }
    // <ubar(t), phi> on the grid
    std::vector<std::vector<double>> ubar_phi(phis.size());
    for (std::size_t p = 0; p < phis.size(); ++p)
      for (double t : spec.clt_times)
        ubar_phi[p].push_back(fields::inner(nc.traj->fields[step_index(t, spec.dt)], phi_grid[p]));

    spdlog::info("{}: eta = {:.6g}, {} realization(s) to t = {}", run_id, nc.eta, spec.R, t_max);
    for (std::uint64_t r = spec.realization_offset; r < spec.realization_offset + spec.R; ++r) {
      const auto cfg = nc.ensemble_config(spec, r, t_max);
      auto observer = [&](std::size_t n, double t, const particles::CoupledEnsemble& ens) {
        for (std::size_t q = 0; q < spec.clt_times.size(); ++q) {
          if (step_index(spec.clt_times[q], spec.dt) != n) continue;
          for (std::size_t p = 0; p < phis.size(); ++p) {
            const double v = statistics::fluctuation_pairing(ens.X, ubar_phi[p][q], phis[p]);
            cells[first + p * spec.clt_times.size() + q].samples.push_back(v);
            if (csv) csv->sample(run_id, r, t, "pairing:" + phis[p].id(), v);
          }
        }
      };
      particles::run_coupled(cfg, init, *nc.pk, *nc.traj, observer);
    }
    if (csv) csv->flush();
  }
  for (auto& c : cells) {
    if (c.samples.size() >= 100 && c.target.primary > 0.0)
      c.report = statistics::normality_report(c.samples, c.target.primary);
  }
  return cells;
}

}  // namespace rmf::experiments
