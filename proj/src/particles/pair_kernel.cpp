#include "rmf/particles/pair_kernel.hpp"

#include <cmath>

#include "rmf/core/errors.hpp"

namespace rmf::particles {

namespace {

// Monomial coefficients in t of the cubic through (0, f0), (1/3, f1),
// (2/3, f2), (1, f3), via Newton forward differences in u = 3t.
void fit_cubic(double f0, double f1, double f2, double f3, double* out) {
  const double d1 = f1 - f0;
  const double d2 = f2 - 2.0 * f1 + f0;
  const double d3 = f3 - 3.0 * f2 + 3.0 * f1 - f0;
  out[0] = f0;
  out[1] = 3.0 * (d1 - 0.5 * d2 + d3 / 3.0);
  out[2] = 9.0 * (0.5 * d2 - 0.5 * d3);
  out[3] = 27.0 * (d3 / 6.0);
}

}  // namespace

PairKernel::PairKernel(const kernels::RadialKernelSet& ks, double s_max, std::size_t cells)
    : eta_(ks.eta()), s_max_(s_max), cells_(cells) {
  if (!(s_max > 0.0) || cells < 16) throw DomainError("PairKernel: bad grid");
  const double ds = s_max / static_cast<double>(cells);
  inv_ds_ = 1.0 / ds;
  v0_ = ks.V().value_at_zero();
  lap0_ = ks.lapV().value_at_zero();

  auto fV = [&](double s) { return kernels::eval_V(ks, std::sqrt(s)); };
  auto fG = [&](double s) {
    if (s <= 0.0) return lap0_ / 3.0;
    const double r = std::sqrt(s);
    return ks.dV()(r) / r;
  };
  auto fL = [&](double s) { return kernels::eval_lapV(ks, std::sqrt(s)); };

  cv_.resize(4 * cells);
  cg_.resize(4 * cells);
  cl_.resize(4 * cells);
  for (std::size_t j = 0; j < cells; ++j) {
    double s[4];
    for (int q = 0; q < 4; ++q) s[q] = (static_cast<double>(j) + q / 3.0) * ds;
    s[3] = static_cast<double>(j + 1) * ds;
    fit_cubic(fV(s[0]), fV(s[1]), fV(s[2]), fV(s[3]), &cv_[4 * j]);
    fit_cubic(fG(s[0]), fG(s[1]), fG(s[2]), fG(s[3]), &cg_[4 * j]);
    fit_cubic(fL(s[0]), fL(s[1]), fL(s[2]), fL(s[3]), &cl_[4 * j]);
  }
}

}  // namespace rmf::particles
