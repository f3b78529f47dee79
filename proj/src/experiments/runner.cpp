#include "rmf/experiments/runner.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "rmf/core/errors.hpp"
#include "rmf/core/hash.hpp"
#include "rmf/experiments/sweep.hpp"
#include "rmf/fields/diagnostics.hpp"
#include "rmf/fields/trajectory_io.hpp"
#include "rmf/kernels/kernel_io.hpp"

namespace rmf::experiments {

namespace fs = std::filesystem;
using nlohmann::json;
using statistics::CsvWriter;

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"kernel-build", "kernel-verify", "pde-run", "dual-run",
                                          "couple-run",   "lln",           "rate",    "clt"};
  return k;
}

namespace {

constexpr const char* tool_version = "0.1.0";
constexpr const char* sample_schema = "run_id,realization,t,statistic,value";

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

fs::path fresh_dir(const std::string& root, const std::string& kind, const std::string& hash) {
  const fs::path base = fs::path(root) / (kind + "-" + hash);
  fs::path dir = base;
  for (int k = 2; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

json gates_json(const GateReport& g) {
  return {{"lambda_sub_coulomb", g.lambda_ok}, {"thm_prob", g.thm_prob},         {"thm_prob_bound", g.thm_prob_bound},
          {"alpha_interval", {g.alpha_lo, g.alpha_hi}}, {"alpha_ok", g.alpha_ok}, {"thm_l2", g.thm_l2},
          {"thm_l2_bound", g.thm_l2_bound}, {"theta_ok", g.theta_ok},           {"p_star", g.p_star},
          {"u0_norm_p_star", g.u0_norm},   {"smallness_threshold", g.threshold}, {"eta", g.etas}};
}

fields::PdeConfig pde_config(const RegimeSpec& spec) {
  fields::PdeConfig pc;
  pc.sigma = spec.sigma;
  pc.kappa = spec.kappa;
  pc.dt = spec.dt;
  pc.T_end = spec.T_end;
  pc.interaction = spec.kappa != 0.0;
  return pc;
}

fields::Trajectory thin(const fields::Trajectory& t, std::size_t every) {
  fields::Trajectory out(t.box);
  out.dt = t.dt;
  out.stride = t.stride * every;
  out.kernel_name = t.kernel_name;
  for (std::size_t j = 0; j < t.times.size(); ++j) {
    if (j % every != 0 && j + 1 != t.times.size()) continue;
    out.times.push_back(t.times[j]);
    out.fields.push_back(t.fields[j]);
    if (!t.drift_fields.empty()) out.drift_fields.push_back(t.drift_fields[j]);
  }
  return out;
}

struct Context {
  const RegimeSpec& spec;
  std::string hash;
  fs::path dir;
  json summary = json::object();
  json kernel_tables = json::object();
  std::ostringstream text;
};

void do_kernel_build(Context& c) {
  kernels::TableConfig tc;
  tc.nodes = c.spec.kernel_nodes;
  for (auto N : c.spec.N_list) {
    const auto ks =
        kernels::build_kernel_set(c.spec.riesz(), c.spec.eta(N), kernels::MollifierProfile::standard_bump(), tc);
    const std::string name = "kernel-N" + std::to_string(N) + ".tbl";
    kernels::export_kernel_set(ks, c.dir / name);
    const std::string h = kernels::kernel_set_hash(ks);
    c.kernel_tables[name] = h;
    c.summary["tables"].push_back({{"N", N}, {"eta", ks.eta()}, {"file", name}, {"hash", h}});
    c.text << "N = " << N << ": eta = " << ks.eta() << ", table " << name << " (" << h << ")\n";
  }
}

void do_kernel_verify(Context& c) {
  kernels::TableConfig tc;
  tc.nodes = c.spec.kernel_nodes;
  const std::vector<double> Ns(c.spec.scaling_N_list.begin(), c.spec.scaling_N_list.end());
  CsvWriter csv((c.dir / "samples.csv").string(), {"run_id", "realization", "t", "statistic", "value"});
  bool all = true;
  const std::pair<kernels::ScalingQuantity, const char*> qs[] = {{kernels::ScalingQuantity::V, "sup_V"},
                                                                  {kernels::ScalingQuantity::gradV, "sup_gradV"},
                                                                  {kernels::ScalingQuantity::hessV, "sup_hessV"},
                                                                  {kernels::ScalingQuantity::Z_L2, "l2_Z"}};
  for (const auto& [q, name] : qs) {
    const auto rep = kernels::verify_scaling_bounds(c.spec.riesz(), c.spec.beta, Ns, q, tc);
    const bool ok = std::abs(rep.slope / rep.predicted_slope - 1.0) <= 0.1;
    all = all && ok;
    for (std::size_t k = 0; k < rep.N.size(); ++k)
      csv.sample(c.hash + "-N" + std::to_string(static_cast<long long>(rep.N[k])), 0, 0.0, name, rep.norm[k]);
    c.summary["scaling"].push_back(
        {{"quantity", name}, {"slope", rep.slope}, {"predicted", rep.predicted_slope}, {"within_10pct", ok}});
    c.text << name << ": slope " << rep.slope << " predicted " << rep.predicted_slope << (ok ? " ok\n" : " OFF\n");
  }
  c.summary["all_within_10pct"] = all;
}

void do_pde_run(Context& c) {
  const auto& s = c.spec;
  const fields::Box box(s.L, s.M);
  const fields::Spectral sp(box);
  const auto u0 = s.initial_density().render(box);
  const auto pc = pde_config(s);
  CsvWriter csv((c.dir / "samples.csv").string(), {"run_id", "realization", "t", "statistic", "value"});
  const double p_star = s.d / (s.d - s.lambda);
  auto record = [&](const std::string& run, const fields::Trajectory& tr) {
    const std::size_t every = s.save_every > 0 ? s.save_every : 1;
    fields::write_trajectory(thin(tr, every), c.dir / run, c.hash);
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
      const auto& u = tr.fields[j];
      csv.sample(run, 0, tr.times[j], "mass", fields::quadrature(u));
      csv.sample(run, 0, tr.times[j], "min", fields::field_min(u));
      csv.sample(run, 0, tr.times[j], "l1", fields::lp_norm(u, 1.0));
      csv.sample(run, 0, tr.times[j], "lp_star", fields::lp_norm(u, p_star));
      csv.sample(run, 0, tr.times[j], "linf", fields::lp_norm(u, INFINITY));
    }
    c.summary["runs"].push_back({{"run", run},
                                 {"kernel", tr.kernel_name},
                                 {"checkpoints", tr.times.size()},
                                 {"max_mass_drift", tr.max_mass_drift},
                                 {"positivity_violations", tr.positivity_violations},
                                 {"worst_negative_ratio", tr.worst_negative_ratio}});
    c.text << run << ": kernel " << tr.kernel_name << ", mass drift " << tr.max_mass_drift << ", positivity violations "
           << tr.positivity_violations << "\n";
  };
  if (s.pde_kernel == "limit") {
    record("limit", fields::solve_limit(u0, s.riesz(), pc));
    return;
  }
  kernels::TableConfig tc;
  tc.nodes = s.kernel_nodes;
  for (auto N : s.N_list) {
    const auto ks = kernels::build_kernel_set(s.riesz(), s.eta(N), kernels::MollifierProfile::standard_bump(), tc);
    c.kernel_tables["N" + std::to_string(N)] = kernels::kernel_set_hash(ks);
    const auto K = s.pde_kernel == "truncated" ? fields::GridKernel::truncated(sp, ks)
                                               : fields::GridKernel::intermediate(sp, ks);
    record(s.pde_kernel + "-N" + std::to_string(N), fields::solve_nonlocal(u0, sp, K, pc));
  }
}

void do_dual_run(Context& c) {
  const auto& s = c.spec;
  const fields::Box box(s.L, s.M);
  const fields::Spectral sp(box);
  const auto u0 = s.initial_density().render(box);
  const auto pc = pde_config(s);
  const auto traj = fields::solve_limit(u0, s.riesz(), pc);
  const auto K = fields::GridKernel::riesz(sp, s.riesz());
  const std::size_t every = s.save_every > 0 ? s.save_every : 10;
  CsvWriter csv((c.dir / "samples.csv").string(), {"run_id", "realization", "t", "statistic", "value"});
  for (const auto& phi : selected_test_functions(s)) {
    const auto grid = phi.render(box);
    for (double t : s.clt_times) {
      const auto v = statistics::clt_target_variance(grid, t, traj, sp, K, pc);
      const std::string run = "dual-" + phi.id() + "-t" + statistics::format_double(t);
      if (t > 0.0) fields::write_trajectory(thin(fields::solve_backward_dual(grid, t, traj, sp, K, pc), every),
                                            c.dir / run, c.hash);
      csv.sample(run, 0, t, "variance_initial", v.initial_term);
      csv.sample(run, 0, t, "variance_integral", v.integral_term);
      csv.sample(run, 0, t, "variance", v.total());
      c.summary["targets"].push_back({{"phi", phi.id()},
                                      {"describe", phi.describe()},
                                      {"t", t},
                                      {"initial_term", v.initial_term},
                                      {"integral_term", v.integral_term},
                                      {"variance", v.total()}});
      c.text << phi.id() << " t=" << t << ": Var = " << v.total() << " (" << v.initial_term << " + "
             << v.integral_term << ")\n";
    }
  }
}

json nsummary_json(const RegimeSpec& s, const SweepOptions& opt, const NSummary& n) {
  json j = {{"N", n.N},
            {"eta", n.eta},
            {"kernel_hash", n.kernel_hash},
            {"realizations", n.coupling_sup.size()},
            {"truncation_warnings", n.truncation_warnings},
            {"negative_flags", n.negative_flags},
            {"pde_positivity_violations", n.positivity_violations},
            {"pde_max_mass_drift", n.pde_mass_drift}};
  const double R = static_cast<double>(n.coupling_sup.size());
  auto largest = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  if (opt.coupling) j["coupling_sup_max"] = largest(n.coupling_sup);
  if (opt.lln) j["lln_b_deviation_max"] = largest(n.lln_b_sup);
  for (std::size_t k = 0; k < s.alpha_list.size() && opt.coupling; ++k)
    j["coupling_exceedance"].push_back({{"alpha", s.alpha_list[k]}, {"probability", n.alpha_exceed[k] / R}});
  for (std::size_t k = 0; k < s.theta_list.size() && opt.lln; ++k)
    j["lln_exceedance"].push_back({{"theta", s.theta_list[k]},
                                   {"probability_B", n.theta_exceed[k] / R},
                                   {"probability_A", n.theta_exceed_a[k] / R}});
  if (!n.rate_stats.empty()) {
    double m = 0.0;
    for (double v : n.rate_stats) m += v;
    j["rate_statistic_mean"] = m / R;
  }
  return j;
}

void do_sweep(Context& c, const std::string& kind) {
  SweepOptions opt;
  opt.errors = kind == "rate";
  opt.lln = kind == "rate" || kind == "lln";
  opt.coupling = kind != "lln";
  if (kind == "couple-run" && c.spec.save_every > 0) {
    fs::create_directories(c.dir / "snapshots");
    opt.snapshot_dir = (c.dir / "snapshots").string();
  }
  CsvWriter csv((c.dir / "samples.csv").string(), {"run_id", "realization", "t", "statistic", "value"});
  const auto res = run_sweep(c.spec, opt, &csv, c.hash + "-");
  if (!opt.snapshot_dir.empty()) {
    const auto steps = static_cast<std::size_t>(std::llround(c.spec.T_end / c.spec.dt));
    std::vector<double> times;
    for (std::size_t n = 0; n <= steps; ++n)
      if (n % c.spec.save_every == 0 || n == steps) times.push_back(static_cast<double>(n) * c.spec.dt);
    const json meta = {{"layout", "N<N>-r<realization>-<X|Xbar>.f64: per snapshot, N particles x (x, y, z), "
                                  "little-endian float64, wrapped to [-L/2, L/2)"},
                       {"N_list", c.spec.N_list},
                       {"realizations", {c.spec.realization_offset, c.spec.realization_offset + c.spec.R - 1}},
                       {"times", times},
                       {"L", c.spec.L},
                       {"config_hash", c.hash}};
    write_text(fs::path(opt.snapshot_dir) / "meta.json", meta.dump(2) + "\n");
  }
  for (const auto& n : res) {
    c.kernel_tables["N" + std::to_string(n.N)] = n.kernel_hash;
    c.summary["per_N"].push_back(nsummary_json(c.spec, opt, n));
    c.text << "N = " << n.N << " (eta " << n.eta << "):";
    for (std::size_t k = 0; k < c.spec.alpha_list.size() && opt.coupling; ++k)
      c.text << " P(coupling > N^-" << c.spec.alpha_list[k]
             << ") = " << static_cast<double>(n.alpha_exceed[k]) / n.coupling_sup.size();
    for (std::size_t k = 0; k < c.spec.theta_list.size() && opt.lln; ++k)
      c.text << " P(B_" << c.spec.theta_list[k]
             << ") = " << static_cast<double>(n.theta_exceed[k]) / n.coupling_sup.size();
    c.text << "\n";
  }
  if (kind == "rate") {
    std::vector<double> Ns;
    std::vector<std::vector<double>> samples;
    for (const auto& n : res) {
      Ns.push_back(static_cast<double>(n.N));
      samples.push_back(n.rate_stats);
    }
    const auto fit = statistics::rate_fit(Ns, samples);
    c.summary["rate_fit"] = {{"slope", fit.slope},
                             {"intercept", fit.intercept},
                             {"ci95", {fit.slope_interval.lo, fit.slope_interval.hi}},
                             {"means", fit.means},
                             {"N", Ns}};
    c.text << "rate slope " << fit.slope << ", 95% bootstrap CI [" << fit.slope_interval.lo << ", "
           << fit.slope_interval.hi << "]\n";
  }
}

void do_clt(Context& c) {
  CsvWriter csv((c.dir / "samples.csv").string(), {"run_id", "realization", "t", "statistic", "value"});
  const auto cells = run_clt(c.spec, &csv, c.hash + "-");
  for (const auto& cell : cells) {
    c.kernel_tables["N" + std::to_string(cell.N)] = cell.kernel_hash;
    const auto& r = cell.report;
    json j = {{"N", cell.N},
              {"phi", cell.phi_id},
              {"t", cell.t},
              {"target_variance", cell.target.primary},
              {"target_limit", cell.target.limit.total()},
              {"target_intermediate", cell.target.intermediate.total()},
              {"samples", cell.samples.size()}};
    if (r.n > 0) {
      j["mean"] = r.mean;
      j["variance"] = r.variance;
      j["variance_ci99"] = {r.variance_interval.lo, r.variance_interval.hi};
      j["ks_statistic"] = r.ks_statistic;
      j["ks_p_value"] = r.ks_p_value;
      j["cf_distance"] = r.cf_distance;
      c.text << "N = " << cell.N << " " << cell.phi_id << " t=" << cell.t << ": var " << r.variance << " target "
             << cell.target.primary << ", KS p " << r.ks_p_value << ", CF distance " << r.cf_distance << "\n";
    } else {
      c.text << "N = " << cell.N << " " << cell.phi_id << " t=" << cell.t
             << ": fewer than 100 samples, no normality report\n";
    }
    c.summary["cells"].push_back(j);
  }
}

}  // namespace

RunResult run_experiment(const std::string& kind, const RegimeSpec& spec, const RunOptions& opt) {
  RunResult res;
  try {
    if (std::find(experiment_kinds().begin(), experiment_kinds().end(), kind) == experiment_kinds().end())
      throw ConfigError("unknown experiment kind '" + kind + "'");
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
    if (kind == "rate" && spec.N_list.size() < 2) throw ConfigError("rate: N_list needs at least two entries");
    const GateReport gates = validate_regime(spec);
    if (!gates.admits(kind) && !opt.force) {
      res.exit_code = exit_config;
      res.message = "theorem gate failed for " + kind + " (use --force to run outside the theory)\n" +
                    format_report(spec, gates);
      return res;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Context c{spec, config_hash(spec), {}, {}, {}, {}};
    c.dir = fresh_dir(opt.out_root, kind, c.hash);
    res.out_dir = c.dir.string();
    write_text(c.dir / "config.txt", canonical(spec));
    if (!gates.admits(kind)) c.text << "EXPLORATORY: outside the theorem gates (--force)\n";

    if (kind == "kernel-build") do_kernel_build(c);
    else if (kind == "kernel-verify") do_kernel_verify(c);
    else if (kind == "pde-run") do_pde_run(c);
    else if (kind == "dual-run") do_dual_run(c);
    else if (kind == "clt") do_clt(c);
    else do_sweep(c, kind);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json config = json::object();
    std::istringstream in(canonical(spec));
    for (std::string line; std::getline(in, line);) {
      const auto eq = line.find(" = ");
      config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    json inputs = json::object();
    if (!opt.config_path.empty()) inputs[opt.config_path] = file_hash(opt.config_path);
    const json manifest = {{"kind", kind},
                           {"config", config},
                           {"config_hash", c.hash},
                           {"tool_version", tool_version},
                           {"kernel_tables", c.kernel_tables},
                           {"input_files", inputs},
                           {"wall_clock_seconds", wall},
                           {"threads", omp_get_max_threads()},
                           {"output_schema", {{"samples.csv", sample_schema}, {"version", 1}}},
                           {"forced", !gates.admits(kind)},
                           {"gates", gates_json(gates)}};
    write_text(c.dir / "manifest.json", manifest.dump(2) + "\n");
    c.summary["config_hash"] = c.hash;
    write_text(c.dir / "summary.json", c.summary.dump(2) + "\n");
    write_text(c.dir / "summary.txt", c.text.str());
    res.message = c.text.str();
  } catch (const NumericalError& e) {
    res.exit_code = exit_numerical;
    res.message = std::string("numerical failure: ") + e.what() + "\n";
  } catch (const Error& e) {
    res.exit_code = exit_config;
    res.message = std::string("error: ") + e.what() + "\n";
  }
  return res;
}

}  // namespace rmf::experiments
