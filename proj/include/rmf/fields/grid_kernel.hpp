#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rmf/fields/spectral.hpp"
#include "rmf/kernels/kernel_set.hpp"

namespace rmf::fields {

// Fourier multipliers of a radial convolution kernel K on the grid: K*f,
// (grad K)*f and (lap K)*f.
//
//   from_symbol  -- analytic whole-space symbol sampled at the grid
//                   wavevectors, k = 0 set to 0 (periodic summation of K
//                   with the mean mode removed).
//   truncated    -- K, grad K and lap K sampled in real space at the
//                   minimum-image node offsets and transformed, so K*f is the
//                   discrete sum h^3 sum_j K(x_i - x_j) f_j over one periodic
//                   cell. This is the grid counterpart of pair sums with the
//                   minimum-image convention.
class GridKernel {
 public:
  static GridKernel from_symbol(const Spectral& sp, const std::function<double(double)>& symbol, std::string name);
  static GridKernel intermediate(const Spectral& sp, const kernels::RadialKernelSet& ks);
  static GridKernel riesz(const Spectral& sp, const kernels::RieszParams& params);
  static GridKernel truncated(const Spectral& sp, const kernels::RadialKernelSet& ks);

  const Box& box() const { return box_; }
  const std::string& name() const { return name_; }
  const std::vector<cplx>& value_multiplier() const { return value_; }
  const std::vector<cplx>& grad_multiplier(int axis) const { return grad_[axis]; }
  const std::vector<cplx>& lap_multiplier() const { return lap_; }

 private:
  GridKernel(const Box& b, std::string name) : box_(b), name_(std::move(name)) {}

  Box box_;
  std::string name_;
  std::vector<cplx> value_;
  std::array<std::vector<cplx>, 3> grad_;
  std::vector<cplx> lap_;
};

GridField convolve(const Spectral& sp, const GridKernel& K, const GridField& f);
VectorField convolve_gradient(const Spectral& sp, const GridKernel& K, const GridField& f);
GridField convolve_laplacian(const Spectral& sp, const GridKernel& K, const GridField& f);

}  // namespace rmf::fields
