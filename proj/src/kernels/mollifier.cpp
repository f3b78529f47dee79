#include "rmf/kernels/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmf/core/errors.hpp"

namespace rmf::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMomentCells = 4000;
constexpr std::size_t kChiNodes = 4001;  // on [0, 2]
constexpr double kFourierStep = 0.01;
constexpr double kFourierMax = 400.0;
constexpr std::size_t kFourierPanels = 64;

using GL = boost::math::quadrature::gauss<double, 20>;

// Nodes and weights of a composite 20-point Gauss-Legendre rule on [a, b].
void composite_gauss(double a, double b, std::size_t panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& abs = GL::abscissa();
  const auto& wts = GL::weights();
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < abs.size(); ++i) {
      const double off = 0.5 * h * abs[i];
      x.push_back(mid - off);
      w.push_back(0.5 * h * wts[i]);
      if (abs[i] != 0.0) {
        x.push_back(mid + off);
        w.push_back(0.5 * h * wts[i]);
      }
    }
  }
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

MollifierProfile::MollifierProfile(std::string name, std::function<double(double)> shape)
    : name_(std::move(name)), shape_(std::move(shape)) {
  std::vector<double> x, w;
  composite_gauss(0.0, 1.0, kFourierPanels, x, w);

  double raw_mass = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) raw_mass += w[q] * shape_(x[q]) * x[q] * x[q];
  raw_mass *= 4.0 * kPi;
  if (!(raw_mass > 0.0) || !std::isfinite(raw_mass)) {
    throw DomainError("MollifierProfile: shape has no positive finite mass");
  }
  norm_ = 1.0 / raw_mass;

  // G(t) = int_0^t xi(s) s ds on a uniform grid, cell by cell.
  g_step_ = 1.0 / kMomentCells;
  g_nodes_.assign(kMomentCells + 1, 0.0);
  for (std::size_t j = 0; j < kMomentCells; ++j) {
    const double a = j * g_step_;
    const double b = a + g_step_;
    const double cell = GL::integrate([&](double s) { return (*this)(s) * s; }, a, b);
    g_nodes_[j + 1] = g_nodes_[j] + cell;
  }

  // chi = xi * xi on [0, 2].
  chi_step_ = 2.0 / (kChiNodes - 1);
  std::vector<double> chi_values(kChiNodes);
  for (std::size_t j = 0; j < kChiNodes; ++j) chi_values[j] = chi_direct(j * chi_step_);
  chi_spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      chi_values.begin(), chi_values.end(), 0.0, chi_step_, 0.0, 0.0);

  // F[xi](k) = 4 pi int xi(r) r^2 sinc(kr) dr.
  fourier_kmax_ = kFourierMax;
  const auto n_k = static_cast<std::size_t>(std::llround(kFourierMax / kFourierStep)) + 1;
  std::vector<double> weighted(x.size());
  for (std::size_t q = 0; q < x.size(); ++q) weighted[q] = 4.0 * kPi * w[q] * (*this)(x[q]) * x[q] * x[q];
  std::vector<double> fvals(n_k);
  for (std::size_t j = 0; j < n_k; ++j) {
    const double k = j * kFourierStep;
    double acc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) acc += weighted[q] * sinc(k * x[q]);
    fvals[j] = acc;
  }
  fourier_tail_bound_ = 0.0;
  for (std::size_t j = n_k - static_cast<std::size_t>(20.0 / kFourierStep); j < n_k; ++j) {
    fourier_tail_bound_ = std::max(fourier_tail_bound_, std::abs(fvals[j]));
  }
  fourier_spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      fvals.begin(), fvals.end(), 0.0, kFourierStep, 0.0);
}

std::shared_ptr<const MollifierProfile> MollifierProfile::standard_bump() {
  static std::once_flag once;
  static std::shared_ptr<const MollifierProfile> bump;
  std::call_once(once, [] {
    bump = std::make_shared<const MollifierProfile>("standard_bump", [](double r) {
      if (r >= 1.0) return 0.0;
      return std::exp(-1.0 / (1.0 - r * r));
    });
  });
  return bump;
}

std::shared_ptr<const MollifierProfile> MollifierProfile::by_name(const std::string& name) {
  if (name == "standard_bump") return standard_bump();
  throw DomainError("unknown mollifier profile '" + name + "'");
}

double MollifierProfile::operator()(double r) const {
  r = std::abs(r);
  if (r >= 1.0) return 0.0;
  return norm_ * shape_(r);
}

double MollifierProfile::fourier(double k) const {
  k = std::abs(k);
  if (k >= fourier_kmax_) return 0.0;
  return (*fourier_spline_)(k);
}

double MollifierProfile::chi(double r) const {
  r = std::abs(r);
  if (r >= 2.0) return 0.0;
  return std::max(0.0, (*chi_spline_)(r));
}

double MollifierProfile::first_moment_cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return g_nodes_.back();
  const double u = t / g_step_;
  const auto j = std::min(static_cast<std::size_t>(u), kMomentCells - 1);
  const double a = j * g_step_;
  const double b = a + g_step_;
  const double th = (t - a) / g_step_;
  // Cubic Hermite with the exact derivative G'(t) = xi(t) t.
  const double d0 = (*this)(a) * a * g_step_;
  const double d1 = (*this)(b) * b * g_step_;
  const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  const double h10 = th * (1 - th) * (1 - th);
  const double h01 = th * th * (3 - 2 * th);
  const double h11 = th * th * (th - 1);
  return h00 * g_nodes_[j] + h10 * d0 + h01 * g_nodes_[j + 1] + h11 * d1;
}

double MollifierProfile::chi_direct(double r) const {
  if (r >= 2.0) return 0.0;
  std::vector<double> x, w;
  if (r < 1e-9) {
    composite_gauss(0.0, 1.0, 32, x, w);
    double m = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double v = (*this)(x[q]);
      m += w[q] * v * v * x[q] * x[q];
    }
    return 4.0 * kPi * m;
  }
  // G(r + s) and G(|r - s|) saturate or fold at s = 1 - r and s = r.
  std::vector<double> cuts{0.0, 1.0};
  for (double c : {r, std::abs(1.0 - r)}) {
    if (c > 1e-12 && c < 1.0 - 1e-12) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] > 1e-14) composite_gauss(cuts[i], cuts[i + 1], 8, x, w);
  }
  double acc = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) {
    const double s = x[q];
    acc += w[q] * (*this)(s) * s * (first_moment_cumulative(r + s) - first_moment_cumulative(std::abs(r - s)));
  }
  return 2.0 * kPi * acc / r;
}

double MollifierProfile::mass() const {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return 4.0 * kPi * GK::integrate([&](double s) { return (*this)(s) * s * s; }, 0.0, 1.0, 20, 1e-15);
}

double MollifierProfile::chi_mass() const {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return 4.0 * kPi * GK::integrate([&](double s) { return chi(s) * s * s; }, 0.0, 2.0, 20, 1e-15);
}

}  // namespace rmf::kernels
