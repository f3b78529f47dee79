#include "rmf/kernels/radial_table.hpp"

#include <cmath>

#include "rmf/core/errors.hpp"

namespace rmf::kernels {

RadialTable::RadialTable(double r_min, double r_max, std::vector<double> values, double value_at_zero,
                         Parity parity, double tail_exponent)
    : r_min_(r_min),
      r_max_(r_max),
      values_(std::move(values)),
      value0_(parity == Parity::odd ? 0.0 : value_at_zero),
      parity_(parity),
      tail_exponent_(tail_exponent) {
  if (!(r_min > 0.0 && r_max > r_min)) throw DomainError("RadialTable: need 0 < r_min < r_max");
  if (values_.size() < 4) throw DomainError("RadialTable: need at least 4 nodes");
  log_step_ = (std::log(r_max_) - std::log(r_min_)) / static_cast<double>(values_.size() - 1);
  tail_coefficient_ = values_.back() * std::pow(r_max_, tail_exponent_);
  spline_ = std::make_shared<const boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      values_.begin(), values_.end(), std::log(r_min_), log_step_);
}

double RadialTable::node(std::size_t i) const {
  if (i + 1 == values_.size()) return r_max_;
  return r_min_ * std::exp(static_cast<double>(i) * log_step_);
}

double RadialTable::operator()(double r) const {
  r = std::abs(r);
  if (r >= r_max_) return tail_coefficient_ * std::pow(r, -tail_exponent_);
  if (r <= r_min_) {
    const double x = r / r_min_;
    if (parity_ == Parity::odd) return values_.front() * x;
    return value0_ + (values_.front() - value0_) * x * x;
  }
  return (*spline_)(std::log(r));
}

}  // namespace rmf::kernels
