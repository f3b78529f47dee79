#include "rmf/kernels/radial_convolution.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rmf/core/errors.hpp"

namespace rmf::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTolerance = 1e-13;

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  return ts;
}

// int_0^R g(s, |r - s|) ds, split at the kink s = r. The distance is passed
// explicitly so integrands singular in |r - s| never see a rounded zero.
template <class G>
double integrate_split(double r, double R, G&& g) {
  auto& ts = integrator();
  if (r >= R) {
    return ts.integrate([&](double s) { return g(s, r - s); }, 0.0, R, kTolerance);
  }
  double acc = 0.0;
  if (r > 0.0) acc += ts.integrate([&](double t) { return g(r - t, t); }, 0.0, r, kTolerance);
  acc += ts.integrate([&](double t) { return g(r + t, t); }, 0.0, R - r, kTolerance);
  return acc;
}

// (1+x)^a - (1-x)^a
double odd_part(double a, double x) { return std::pow(1.0 + x, a) - std::pow(1.0 - x, a); }
// (1+x)^a + (1-x)^a
double even_part(double a, double x) { return std::pow(1.0 + x, a) + std::pow(1.0 - x, a); }

// x ((1+x)^{q-1} + (1-x)^{q-1}) - ((1+x)^q - (1-x)^q)/q, which is O(x^3).
// Below x = 0.1 the binomial series avoids the cancellation.
double derivative_kernel(double q, double x) {
  if (x >= 0.1) return x * even_part(q - 1.0, x) - odd_part(q, x) / q;
  // Odd coefficients c_n = 2 binom(q-1, n-1) - 2 binom(q, n) / q.
  double binom_qm1 = 1.0;  // binom(q-1, n-1), starts at n = 1
  double binom_q = q;      // binom(q, n), starts at n = 1
  double sum = 0.0;
  double xn = x;
  for (int n = 1; n <= 25; n += 2) {
    if (n >= 3) sum += (2.0 * binom_qm1 - 2.0 * binom_q / q) * xn;
    // advance both binomials by two orders
    binom_qm1 *= (q - 1.0 - (n - 1)) / n * (q - 1.0 - n) / (n + 1);
    binom_q *= (q - n) / (n + 1) * (q - n - 1) / (n + 2);
    xn *= x * x;
  }
  return sum;
}

}  // namespace

double PowerConvolution::value(double r) const {
  r = std::abs(r);
  if (r == 0.0) return value_at_zero();
  const double q = 2.0 - p;
  const double acc = integrate_split(r, support, [&](double s, double t) {
    if (s <= 0.0) return 0.0;
    // K(r, s) / r with K = ((r+s)^q - |r-s|^q) / q
    double k_over_r;
    if (s > r) {
      const double x = r / s;
      k_over_r = std::pow(s, q) * odd_part(q, x) / (q * r);
    } else {
      k_over_r = (std::pow(r + s, q) - std::pow(t, q)) / (q * r);
    }
    return profile(s) * s * k_over_r;
  });
  return 2.0 * kPi * acc;
}

double PowerConvolution::derivative(double r) const {
  r = std::abs(r);
  if (r == 0.0) return 0.0;
  if (p >= 1.0) throw DomainError("PowerConvolution::derivative requires p < 1");
  const double q = 2.0 - p;
  // V' = (2 pi / r^2) int f(s) s (r K_r - K) ds
  const double acc = integrate_split(r, support, [&](double s, double t) {
    if (s <= 0.0) return 0.0;
    double h;
    if (s > r) {
      h = std::pow(s, q) * derivative_kernel(q, r / s);
    } else {
      const double y = s / r;
      h = std::pow(r, q) * (odd_part(q - 1.0, y) - odd_part(q, y) / q);
    }
    (void)t;
    return profile(s) * s * h;
  });
  return 2.0 * kPi * acc / (r * r);
}

double PowerConvolution::laplacian(double r) const {
  r = std::abs(r);
  if (r == 0.0) return laplacian_at_zero();
  if (p >= 1.0) throw DomainError("PowerConvolution::laplacian requires p < 1");
  // Delta V = (2 pi / r) A''(r), A'' = (1-p) int f s ((r+s)^{-p} - |r-s|^{-p}) ds
  const double acc = integrate_split(r, support, [&](double s, double t) {
    if (s <= 0.0 || t <= 0.0) return 0.0;
    return profile(s) * s * (std::pow(r + s, -p) - std::pow(t, -p));
  });
  return 2.0 * kPi * (1.0 - p) * acc / r;
}

double PowerConvolution::value_at_zero() const {
  auto& ts = integrator();
  const double m = ts.integrate([&](double s) { return profile(s) * std::pow(s, 2.0 - p); }, 0.0, support,
                                kTolerance);
  return 4.0 * kPi * m;
}

double PowerConvolution::laplacian_at_zero() const {
  auto& ts = integrator();
  const double m = ts.integrate([&](double s) { return profile(s) * std::pow(s, -p); }, 0.0, support,
                                kTolerance);
  return 4.0 * kPi * p * (p - 1.0) * m;
}

}  // namespace rmf::kernels
