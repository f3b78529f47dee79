#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace rmf::kernels {

enum class Parity { even, odd };

// Samples of a radial profile on a log-spaced grid [r_min, r_max] with
// cubic interpolation in log r. Below r_min the profile is continued as
// v0 + c r^2 (even) or c r (odd); above r_max as the power law a r^{-p}
// matched to the last sample.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(double r_min, double r_max, std::vector<double> values, double value_at_zero,
              Parity parity, double tail_exponent);

  double operator()(double r) const;

  std::size_t size() const { return values_.size(); }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double node(std::size_t i) const;
  const std::vector<double>& values() const { return values_; }
  double value_at_zero() const { return value0_; }
  Parity parity() const { return parity_; }
  double tail_exponent() const { return tail_exponent_; }
  double tail_coefficient() const { return tail_coefficient_; }

 private:
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  double log_step_ = 0.0;
  std::vector<double> values_;
  double value0_ = 0.0;
  Parity parity_ = Parity::even;
  double tail_exponent_ = 0.0;
  double tail_coefficient_ = 0.0;
  std::shared_ptr<const boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

}  // namespace rmf::kernels
