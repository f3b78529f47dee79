#include "rmf/statistics/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "rmf/core/errors.hpp"

namespace rmf::statistics {

Moments moments(const std::vector<double>& x) {
  if (x.size() < 2) throw DomainError("moments: need at least two samples");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / static_cast<double>(x.size() - 1)};
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_test_normal(std::vector<double> x, double mean, double variance) {
  if (x.empty()) throw DomainError("ks_test_normal: no samples");
  if (!(variance > 0.0)) throw DomainError("ks_test_normal: variance must be positive");
  std::sort(x.begin(), x.end());
  const boost::math::normal_distribution<double> dist(mean, std::sqrt(variance));
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = boost::math::cdf(dist, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

Interval variance_ci(double sample_variance, std::size_t n, double level) {
  if (n < 2) throw DomainError("variance_ci: need at least two samples");
  const double dof = static_cast<double>(n - 1);
  const boost::math::chi_squared_distribution<double> chi(dof);
  const double a = 0.5 * (1.0 - level);
  return {dof * sample_variance / boost::math::quantile(chi, 1.0 - a),
          dof * sample_variance / boost::math::quantile(chi, a)};
}

NormalityReport normality_report(const std::vector<double>& samples, double target_variance, double ci_level) {
  if (!(target_variance > 0.0)) throw DomainError("normality_report: target variance must be positive");
  if (samples.size() < 100) throw DomainError("normality_report: need at least 100 samples");
  NormalityReport r;
  r.n = samples.size();
  const Moments m = moments(samples);
  r.mean = m.mean;
  r.variance = m.variance;
  r.variance_interval = variance_ci(m.variance, r.n, ci_level);
  r.target_variance = target_variance;
  const KsResult ks = ks_test_normal(samples, 0.0, target_variance);
  r.ks_statistic = ks.statistic;
  r.ks_p_value = ks.p_value;
  const double theta_max = 3.0 / std::sqrt(target_variance);
  for (int q = 0; q < 21; ++q) {
    const double theta = -theta_max + q * theta_max / 10.0;
    std::complex<double> e{0.0, 0.0};
    for (double v : samples) e += std::polar(1.0, theta * v);
    e /= static_cast<double>(samples.size());
    r.cf_distance = std::max(r.cf_distance, std::abs(e - std::exp(-0.5 * theta * theta * target_variance)));
  }
  return r;
}

namespace {

struct Line {
  double slope, intercept;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double b = sxy / sxx;
  return {b, my - b * mx};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

RateFit rate_fit(const std::vector<double>& N_list, const std::vector<std::vector<double>>& samples, double level,
                 std::size_t resamples, std::uint64_t seed) {
  if (N_list.size() < 2 || N_list.size() != samples.size()) throw DomainError("rate_fit: need matching N and samples");
  std::vector<double> lx;
  RateFit fit;
  for (std::size_t k = 0; k < N_list.size(); ++k) {
    if (samples[k].empty()) throw DomainError("rate_fit: no realizations");
    const double m = mean_of(samples[k]);
    if (!(m > 0.0)) throw DomainError("rate_fit: non-positive mean");
    fit.means.push_back(m);
    lx.push_back(std::log(N_list[k]));
  }
  std::vector<double> ly;
  for (double m : fit.means) ly.push_back(std::log(m));
  const Line line = ols(lx, ly);
  fit.slope = line.slope;
  fit.intercept = line.intercept;

  std::mt19937_64 gen(seed);
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<double> by(N_list.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    bool ok = true;
    for (std::size_t k = 0; k < N_list.size(); ++k) {
      const auto& s = samples[k];
      std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
      double m = 0.0;
      for (std::size_t r = 0; r < s.size(); ++r) m += s[pick(gen)];
      m /= static_cast<double>(s.size());
      if (!(m > 0.0)) ok = false;
      by[k] = ok ? std::log(m) : 0.0;
    }
    if (ok) slopes.push_back(ols(lx, by).slope);
  }
  if (slopes.empty()) throw NumericalError("rate_fit: every bootstrap resample had a non-positive mean");
  std::sort(slopes.begin(), slopes.end());
  auto pct = [&](double p) {
    const double pos = p * static_cast<double>(slopes.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < slopes.size() ? slopes[i] * (1.0 - f) + slopes[i + 1] * f : slopes[i];
  };
  const double a = 0.5 * (1.0 - level);
  fit.slope_interval = {pct(a), pct(1.0 - a)};
  return fit;
}

}  // namespace rmf::statistics
