#pragma once

#include <functional>

namespace rmf::kernels {

// Radial convolutions in R^3 of a compactly supported radial profile f
// (support [0, R]) with the power law |x|^{-p}, 0 < p < 2. In three
// dimensions the angular integral is elementary:
//   (f * |.|^{-p})(r) = (2 pi / r) int_0^R f(s) s K(r, s) ds,
//   K(r, s) = ((r+s)^{2-p} - |r-s|^{2-p}) / (2-p).
struct PowerConvolution {
  std::function<double(double)> profile;
  double support = 1.0;
  double p = 0.5;

  double value(double r) const;
  // d/dr of value(r).
  double derivative(double r) const;
  // Laplacian 2 pi A''(r) / r; requires p < 1.
  double laplacian(double r) const;

  double value_at_zero() const;      // 4 pi int f s^{2-p} ds
  double laplacian_at_zero() const;  // 4 pi p (p-1) int f s^{-p} ds
};

}  // namespace rmf::kernels
