#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rmf::statistics {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};
Moments moments(const std::vector<double>& x);

// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
// One-sample Kolmogorov-Smirnov test against N(mean, variance); p-value from
// the asymptotic distribution with Stephens' finite-n correction.
KsResult ks_test_normal(std::vector<double> x, double mean, double variance);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};
// Chi-square interval for a normal variance from n samples.
Interval variance_ci(double sample_variance, std::size_t n, double level);

struct NormalityReport {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  Interval variance_interval;
  double target_variance = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  // sup over 21 theta in [-3/sqrt(Var), 3/sqrt(Var)] of
  // |mean exp(i theta x) - exp(-theta^2 Var / 2)|.
  double cf_distance = 0.0;
};
NormalityReport normality_report(const std::vector<double>& samples, double target_variance, double ci_level = 0.99);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  Interval slope_interval;  // percentile bootstrap over realizations
  std::vector<double> means;
};
// OLS of log(mean) on log(N); samples[k] are the realizations at N_list[k].
RateFit rate_fit(const std::vector<double>& N_list, const std::vector<std::vector<double>>& samples,
                 double level = 0.95, std::size_t resamples = 2000, std::uint64_t seed = 20240607);

}  // namespace rmf::statistics
