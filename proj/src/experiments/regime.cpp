#include "rmf/experiments/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rmf/core/errors.hpp"
#include "rmf/core/hash.hpp"
#include "rmf/fields/diagnostics.hpp"
#include "rmf/statistics/csv.hpp"

namespace rmf::experiments {

using statistics::format_double;

fields::InitialDensity RegimeSpec::initial_density() const { return fields::InitialDensity::mixture(u0); }

double RegimeSpec::eta(std::size_t N) const { return std::pow(static_cast<double>(N), -beta); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range: '" + v + "'");
  }
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split(v, ',')) out.push_back(to_double(key, p));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& p : split(v, ',')) out.push_back(static_cast<std::size_t>(to_uint(key, p)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string choice(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  throw ConfigError(key + ": unknown value '" + v + "'");
}

// weight:mx:my:mz:std[;...]
std::vector<fields::GaussianComponent> to_u0(const std::string& v) {
  std::vector<fields::GaussianComponent> out;
  for (const auto& comp : split(v, ';')) {
    const auto f = split(comp, ':');
    if (f.size() != 5) throw ConfigError("u0: expected weight:mx:my:mz:std, got '" + comp + "'");
    fields::GaussianComponent g;
    g.weight = to_double("u0", f[0]);
    g.mean = {to_double("u0", f[1]), to_double("u0", f[2]), to_double("u0", f[3])};
    g.std = to_double("u0", f[4]);
    if (!(g.weight > 0.0) || !(g.std > 0.0)) throw ConfigError("u0: weight and std must be positive");
    out.push_back(g);
  }
  if (out.empty()) throw ConfigError("u0: no components");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

void check(const RegimeSpec& s) {
  if (s.d < 1) throw ConfigError("d must be positive");
  if (!(s.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(s.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(s.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (s.kappa != 1.0 && s.kappa != -1.0 && s.kappa != 0.0) throw ConfigError("kappa must be 1, -1 or 0");
  if (!(s.dt > 0.0) || !(s.T_end >= 0.0)) throw ConfigError("dt must be positive and T_end nonnegative");
  if (!(s.L > 0.0)) throw ConfigError("L must be positive");
  if (s.M < 16 || (s.M & (s.M - 1)) != 0) throw ConfigError("M must be a power of two >= 16");
  if (s.R < 1) throw ConfigError("R must be at least 1");
  for (auto N : s.N_list)
    if (N < 1) throw ConfigError("N_list entries must be positive");
  for (auto N : s.scaling_N_list)
    if (N < 1) throw ConfigError("scaling_N_list entries must be positive");
  for (double t : s.clt_times)
    if (t < 0.0 || t > s.T_end + 1e-12) throw ConfigError("clt_times must lie in [0, T_end]");
  if (s.lln_every < 1) throw ConfigError("lln_every must be positive");
}

}  // namespace

RegimeSpec parse_config(const std::string& text) {
  RegimeSpec s;
  std::istringstream in(text);
  std::string line;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (seen[key]++) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      if (key == "d") s.d = static_cast<int>(to_uint(key, v));
      else if (key == "lambda") s.lambda = to_double(key, v);
      else if (key == "beta") s.beta = to_double(key, v);
      else if (key == "alpha_list") s.alpha_list = to_doubles(key, v);
      else if (key == "theta_list") s.theta_list = to_doubles(key, v);
      else if (key == "sigma") s.sigma = to_double(key, v);
      else if (key == "kappa") s.kappa = to_double(key, v);
      else if (key == "N_list") s.N_list = to_sizes(key, v);
      else if (key == "scaling_N_list") s.scaling_N_list = to_sizes(key, v);
      else if (key == "R") s.R = to_uint(key, v);
      else if (key == "T_end") s.T_end = to_double(key, v);
      else if (key == "dt") s.dt = to_double(key, v);
      else if (key == "L") s.L = to_double(key, v);
      else if (key == "M") s.M = to_uint(key, v);
      else if (key == "u0") s.u0 = to_u0(v);
      else if (key == "seed") s.seed = to_uint(key, v);
      else if (key == "realization_offset") s.realization_offset = to_uint(key, v);
      else if (key == "pde_kernel") s.pde_kernel = choice(key, v, {"truncated", "intermediate", "limit"});
      else if (key == "clt_times") s.clt_times = to_doubles(key, v);
      else if (key == "clt_dual") s.clt_dual = choice(key, v, {"limit", "intermediate"});
      else if (key == "phi") s.phi = v;
      else if (key == "lln_every") s.lln_every = to_uint(key, v);
      else if (key == "save_every") s.save_every = to_uint(key, v);
      else if (key == "kernel_nodes") s.kernel_nodes = to_uint(key, v);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  check(s);
  return s;
}

RegimeSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical(const RegimeSpec& s) {
  std::map<std::string, std::string> kv;
  kv["d"] = std::to_string(s.d);
  kv["lambda"] = format_double(s.lambda);
  kv["beta"] = format_double(s.beta);
  kv["alpha_list"] = join(s.alpha_list);
  kv["theta_list"] = join(s.theta_list);
  kv["sigma"] = format_double(s.sigma);
  kv["kappa"] = format_double(s.kappa);
  kv["N_list"] = join(s.N_list);
  kv["scaling_N_list"] = join(s.scaling_N_list);
  kv["R"] = std::to_string(s.R);
  kv["T_end"] = format_double(s.T_end);
  kv["dt"] = format_double(s.dt);
  kv["L"] = format_double(s.L);
  kv["M"] = std::to_string(s.M);
  std::string u0;
  for (std::size_t i = 0; i < s.u0.size(); ++i) {
    const auto& g = s.u0[i];
    if (i) u0 += ';';
    u0 += format_double(g.weight) + ':' + format_double(g.mean.x) + ':' + format_double(g.mean.y) + ':' +
          format_double(g.mean.z) + ':' + format_double(g.std);
  }
  kv["u0"] = u0;
  kv["seed"] = std::to_string(s.seed);
  kv["realization_offset"] = std::to_string(s.realization_offset);
  kv["pde_kernel"] = s.pde_kernel;
  kv["clt_times"] = join(s.clt_times);
  kv["clt_dual"] = s.clt_dual;
  kv["phi"] = s.phi;
  kv["lln_every"] = std::to_string(s.lln_every);
  kv["save_every"] = std::to_string(s.save_every);
  kv["kernel_nodes"] = std::to_string(s.kernel_nodes);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const RegimeSpec& spec) { return fnv1a_hex(canonical(spec)); }

bool GateReport::all_alpha() const { return std::all_of(alpha_ok.begin(), alpha_ok.end(), [](bool b) { return b; }); }
bool GateReport::all_theta() const { return std::all_of(theta_ok.begin(), theta_ok.end(), [](bool b) { return b; }); }

bool GateReport::admits(const std::string& kind) const {
  if (!lambda_ok) return false;
  if (kind == "couple-run") return thm_prob && all_alpha();
  if (kind == "lln") return thm_prob && all_theta();
  if (kind == "rate") return thm_l2 && thm_prob && all_alpha() && all_theta();
  if (kind == "clt") return thm_l2;
  if (kind == "validate-regime") return thm_prob && all_alpha() && thm_l2 && all_theta();
  return true;
}

GateReport validate_regime(const RegimeSpec& s) {
  GateReport g;
  g.lambda_ok = s.lambda > 0.0 && s.lambda < s.d - 2;
  g.thm_prob_bound = 1.0 / (4.0 * s.lambda + 12.0);
  g.thm_prob = s.beta > 0.0 && s.beta < g.thm_prob_bound;
  g.alpha_lo = s.beta * (s.lambda + 3.0);
  g.alpha_hi = 0.5 - s.beta * (s.lambda + 1.0);
  for (double a : s.alpha_list) g.alpha_ok.push_back(a > g.alpha_lo && a < g.alpha_hi);
  g.thm_l2_bound = 1.0 / (8.0 * s.lambda + 12.0);
  g.thm_l2 = s.beta > 0.0 && s.beta < g.thm_l2_bound;
  for (double t : s.theta_list) g.theta_ok.push_back(t > 0.0 && t < 0.5);
  g.p_star = s.d / (s.d - s.lambda);
  for (auto N : s.N_list) g.etas.push_back(s.eta(N));
  const fields::Box box(s.L, s.M);
  g.u0_norm = fields::lp_norm(s.initial_density().render(box), g.p_star);
  if (s.d == 3 && g.lambda_ok) g.threshold = fields::smallness_threshold(s.riesz(), s.sigma);
  return g;
}

std::string format_report(const RegimeSpec& s, const GateReport& g) {
  std::ostringstream o;
  auto pf = [](bool b) { return b ? "pass" : "FAIL"; };
  char buf[256];
  std::snprintf(buf, sizeof buf, "d = %d, lambda = %g, beta = %g, sigma = %g, kappa = %g\n", s.d, s.lambda, s.beta,
                s.sigma, s.kappa);
  o << buf;
  std::snprintf(buf, sizeof buf, "sub-Coulomb 0 < lambda < d-2: %s\n", pf(g.lambda_ok));
  o << buf;
  std::snprintf(buf, sizeof buf, "Thm 1.1 gate beta < 1/(4 lambda + 12) = %.6g: %s\n", g.thm_prob_bound,
                pf(g.thm_prob));
  o << buf;
  std::snprintf(buf, sizeof buf, "  admissible alpha interval (%.6g, %.6g)\n", g.alpha_lo, g.alpha_hi);
  o << buf;
  for (std::size_t i = 0; i < s.alpha_list.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  alpha = %g: %s\n", s.alpha_list[i], pf(g.alpha_ok[i]));
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "Thm 1.2 gate beta < 1/(8 lambda + 12) = %.6g: %s\n", g.thm_l2_bound, pf(g.thm_l2));
  o << buf;
  for (std::size_t i = 0; i < s.theta_list.size(); ++i) {
    std::snprintf(buf, sizeof buf, "LLN theta = %g in (0, 1/2): %s\n", s.theta_list[i], pf(g.theta_ok[i]));
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "p* = d/(d - lambda) = %.6g; ||u0||_p* = %.6g vs diagnostic C(p*) = %.6g (%s)\n",
                g.p_star, g.u0_norm, g.threshold, g.u0_norm < g.threshold ? "below" : "not below");
  o << buf;
  for (std::size_t i = 0; i < s.N_list.size(); ++i) {
    std::snprintf(buf, sizeof buf, "N = %zu: eta = N^-beta = %.6g\n", s.N_list[i], g.etas[i]);
    o << buf;
  }
  return o.str();
}

}  // namespace rmf::experiments
