#include "rmf/kernels/kernel_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "rmf/core/errors.hpp"
#include "rmf/kernels/radial_convolution.hpp"

namespace rmf::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

RadialKernelSet::RadialKernelSet(RieszParams params, double eta, std::shared_ptr<const MollifierProfile> mollifier,
                                 RadialTable V, RadialTable dV, RadialTable lapV, RadialTable Z)
    : params_(params),
      eta_(eta),
      mollifier_(std::move(mollifier)),
      V_(std::move(V)),
      dV_(std::move(dV)),
      lapV_(std::move(lapV)),
      Z_(std::move(Z)),
      c_psi_(psi_constant(params)),
      symbol_constant_(riesz_fourier_constant(params.d(), params.lambda())) {}

double RadialKernelSet::symbol_V(double k) const {
  k = std::abs(k);
  if (k == 0.0) return 0.0;
  const double f = mollifier_->fourier(eta_ * k);
  return f * f * symbol_constant_ * std::pow(k, params_.lambda() - 3.0);
}

double RadialKernelSet::symbol_Z(double k) const {
  k = std::abs(k);
  if (k == 0.0) return 0.0;
  return mollifier_->fourier(eta_ * k) * std::sqrt(symbol_constant_) * std::pow(k, 0.5 * (params_.lambda() - 3.0));
}

double fourier_route_V(const RieszParams& params, double eta, const MollifierProfile& mollifier, double r) {
  if (!(r > 0.0)) throw DomainError("fourier_route_V: r must be positive");
  const double lambda = params.lambda();
  const double C = riesz_fourier_constant(3, lambda);
  // Split F[xi]^2 = 1 + (F[xi]^2 - 1): the constant part transforms back to
  // Phi exactly, the remainder decays like k^lambda at the origin.
  auto remainder = [&](double k) {
    const double f = mollifier.fourier(eta * k);
    return std::pow(k, lambda - 2.0) * (f * f - 1.0);
  };
  boost::math::quadrature::ooura_fourier_sin<double> sine_transform(1e-10, 10);
  const auto [integral, rel_err] = sine_transform.integrate(remainder, r);
  (void)rel_err;
  return std::pow(r, -lambda) + C / (2.0 * kPi * kPi * r) * integral;
}

RadialKernelSet build_kernel_set(const RieszParams& params, double eta,
                                 std::shared_ptr<const MollifierProfile> mollifier, const TableConfig& cfg) {
  if (params.d() != 3) throw DomainError("build_kernel_set: numerical kernels are implemented for d = 3 only");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("build_kernel_set: eta must be positive");
  if (!mollifier) throw DomainError("build_kernel_set: missing mollifier");
  if (cfg.nodes < 16) throw DomainError("build_kernel_set: need at least 16 table nodes");
  const double r_min = cfg.r_min_factor * eta;
  const double r_max = std::max(cfg.r_max_factor * eta, cfg.r_max_floor);
  if (r_max < 100.0 * eta) throw DomainError("build_kernel_set: table extent r_max must be >= 100 eta");

  const double lambda = params.lambda();
  const double mu = params.psi_exponent();
  const double c_psi = psi_constant(params);
  const MollifierProfile& m = *mollifier;
  const double inv_eta3 = 1.0 / (eta * eta * eta);

  PowerConvolution chi_phi{[&m, eta, inv_eta3](double s) { return inv_eta3 * m.chi(s / eta); }, 2.0 * eta, lambda};
  PowerConvolution xi_psi{[&m, eta, inv_eta3](double s) { return inv_eta3 * m(s / eta); }, eta, mu};

  const std::size_t n = cfg.nodes;
  const double log_step = (std::log(r_max) - std::log(r_min)) / static_cast<double>(n - 1);
  std::vector<double> v(n), dv(n), lap(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i + 1 == n) ? r_max : r_min * std::exp(static_cast<double>(i) * log_step);
    v[i] = chi_phi.value(r);
    dv[i] = chi_phi.derivative(r);
    lap[i] = chi_phi.laplacian(r);
    z[i] = c_psi * xi_psi.value(r);
  }

  RadialKernelSet ks(params, eta, mollifier,
                     RadialTable(r_min, r_max, std::move(v), chi_phi.value_at_zero(), Parity::even, lambda),
                     RadialTable(r_min, r_max, std::move(dv), 0.0, Parity::odd, lambda + 1.0),
                     RadialTable(r_min, r_max, std::move(lap), chi_phi.laplacian_at_zero(), Parity::even,
                                 lambda + 2.0),
                     RadialTable(r_min, r_max, std::move(z), c_psi * xi_psi.value_at_zero(), Parity::even, mu));

  // Self-consistency against the sine-transform route.
  const double a = cfg.check_from * eta;
  const double b = cfg.check_to * eta;
  for (std::size_t j = 0; j < cfg.check_points; ++j) {
    const double t = cfg.check_points > 1 ? static_cast<double>(j) / (cfg.check_points - 1) : 0.0;
    const double r = a * std::pow(b / a, t);
    const double direct = ks.V()(r);
    const double spectral = fourier_route_V(params, eta, m, r);
    const double rel = std::abs(direct - spectral) / std::abs(spectral);
    if (!(rel <= cfg.check_tolerance)) {
      throw NumericalError("build_kernel_set: radial quadrature and Fourier route disagree at r = " +
                           std::to_string(r) + " (relative difference " + std::to_string(rel) + ")");
    }
  }
  return ks;
}

double eval_V(const RadialKernelSet& ks, double r) { return ks.V()(r); }

Vec3 eval_gradV(const RadialKernelSet& ks, const Vec3& x) {
  const double r = norm(x);
  if (r == 0.0) return {};
  return (ks.dV()(r) / r) * x;
}

double eval_lapV(const RadialKernelSet& ks, double r) { return ks.lapV()(r); }

double eval_Z(const RadialKernelSet& ks, double r) { return ks.Z()(r); }

double eval_hessian_bound(const RadialKernelSet& ks, double r) {
  r = std::abs(r);
  if (r == 0.0) return std::abs(ks.lapV().value_at_zero() / 3.0);
  const double d1 = ks.dV()(r);
  const double d2 = ks.lapV()(r) - 2.0 * d1 / r;
  return std::max(std::abs(d2), std::abs(d1 / r));
}

double z_l2_norm(const RadialKernelSet& ks) {
  using GL = boost::math::quadrature::gauss<double, 7>;
  const RadialTable& z = ks.Z();
  // core: [0, r_min]
  double acc = GL::integrate([&](double r) { const double v = z(r); return 4.0 * kPi * r * r * v * v; }, 0.0,
                             z.r_min());
  // table body in log r, one Gauss panel per node interval
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double lo = std::log(z.node(i));
    const double hi = std::log(z.node(i + 1));
    acc += GL::integrate(
        [&](double t) {
          const double r = std::exp(t);
          const double v = z(r);
          return 4.0 * kPi * r * r * r * v * v;
        },
        lo, hi);
  }
  // power-law tail: 4 pi c^2 int_{r_max}^inf r^{2 - 2 mu} dr
  const double c = z.tail_coefficient();
  const double p = z.tail_exponent();
  acc += 4.0 * kPi * c * c * std::pow(z.r_max(), 3.0 - 2.0 * p) / (2.0 * p - 3.0);
  return std::sqrt(acc);
}

ScalingReport verify_scaling_bounds(const RieszParams& params, double beta, const std::vector<double>& N_list,
                                    ScalingQuantity quantity, const TableConfig& cfg) {
  if (N_list.size() < 4) throw DomainError("verify_scaling_bounds: need at least 4 particle counts");
  if (!(beta > 0.0)) throw DomainError("verify_scaling_bounds: beta must be positive");
  ScalingReport rep;
  rep.quantity = quantity;
  const double lambda = params.lambda();
  switch (quantity) {
    case ScalingQuantity::V: rep.predicted_slope = beta * lambda; break;
    case ScalingQuantity::gradV: rep.predicted_slope = beta * (lambda + 1.0); break;
    case ScalingQuantity::hessV: rep.predicted_slope = beta * (lambda + 2.0); break;
    case ScalingQuantity::Z_L2: rep.predicted_slope = 0.5 * beta * lambda; break;
  }
  rep.N = N_list;
  rep.eta.resize(N_list.size());
  rep.norm.resize(N_list.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t j = 0; j < N_list.size(); ++j) {
    const double eta = std::pow(N_list[j], -beta);
    const auto ks = build_kernel_set(params, eta, MollifierProfile::standard_bump(), cfg);
    double sup = 0.0;
    switch (quantity) {
      case ScalingQuantity::V:
        sup = std::abs(ks.V().value_at_zero());
        for (double v : ks.V().values()) sup = std::max(sup, std::abs(v));
        break;
      case ScalingQuantity::gradV:
        for (double v : ks.dV().values()) sup = std::max(sup, std::abs(v));
        break;
      case ScalingQuantity::hessV:
        sup = eval_hessian_bound(ks, 0.0);
        for (std::size_t i = 0; i < ks.dV().size(); ++i) sup = std::max(sup, eval_hessian_bound(ks, ks.dV().node(i)));
        break;
      case ScalingQuantity::Z_L2: sup = z_l2_norm(ks); break;
    }
    rep.eta[j] = eta;
    rep.norm[j] = sup;
  }

  std::vector<double> lx(N_list.size()), ly(N_list.size());
  for (std::size_t j = 0; j < N_list.size(); ++j) {
    lx[j] = std::log(N_list[j]);
    ly[j] = std::log(rep.norm[j]);
  }
  rep.slope = least_squares_slope(lx, ly);
  return rep;
}

}  // namespace rmf::kernels
