#pragma once

#include <cstddef>
#include <vector>

#include "rmf/kernels/kernel_set.hpp"

namespace rmf::particles {

// V^eta, g = (V^eta)'(r)/r and lap V^eta as cubic polynomials in s = r^2 on
// a uniform s-grid, for the O(N^2) pair loops. Samples come from the
// RadialKernelSet at four points per cell, so the table is continuous and
// agrees with the set to interpolation accuracy.
class PairKernel {
 public:
  // s_max must cover every minimum-image squared distance, 3 (L/2)^2.
  PairKernel(const kernels::RadialKernelSet& ks, double s_max, std::size_t cells = 16384);

  double eta() const { return eta_; }
  double s_max() const { return s_max_; }
  double value_at_zero() const { return v0_; }
  double lap_at_zero() const { return lap0_; }

  double V(double s) const { return eval(cv_, s); }
  double g(double s) const { return eval(cg_, s); }
  double lap(double s) const { return eval(cl_, s); }

 private:
  double eval(const std::vector<double>& c, double s) const {
    double u = s * inv_ds_;
    auto j = static_cast<std::size_t>(u);
    if (j >= cells_) {
      j = cells_ - 1;
      u = static_cast<double>(cells_);
    }
    const double t = u - static_cast<double>(j);
    const double* p = &c[4 * j];
    return p[0] + t * (p[1] + t * (p[2] + t * p[3]));
  }

  double eta_;
  double s_max_;
  std::size_t cells_;
  double inv_ds_;
  double v0_;
  double lap0_;
  std::vector<double> cv_, cg_, cl_;
};

}  // namespace rmf::particles
