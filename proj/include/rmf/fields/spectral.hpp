#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rmf/fields/grid.hpp"

namespace rmf::fields {

using cplx = std::complex<double>;

// Real-to-complex 3-D transforms on a Box through FFTW (estimate-mode plans,
// so results do not depend on timing). Plans are created once; execution is
// reentrant, one Spectral may be shared by several threads.
//
// The half spectrum has M x M x (M/2 + 1) modes, laid out like FFTW's r2c
// output. Integer wavenumber along an axis is n = i for i < M/2 and i - M
// otherwise (the last axis stores 0..M/2).
class Spectral {
 public:
  explicit Spectral(const Box& box);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Box& box() const { return box_; }
  std::size_t spectral_size() const { return box_.M() * box_.M() * (box_.M() / 2 + 1); }

  // Unnormalized forward transform.
  void forward(const double* in, cplx* out) const;
  // Inverse transform including the 1/M^3 factor; `in` is left untouched.
  void inverse(const cplx* in, double* out) const;

  std::vector<cplx> forward(const std::vector<double>& in) const;
  std::vector<double> inverse(const std::vector<cplx>& in) const;

  // Integer wavenumbers of half-spectrum mode q along each axis.
  std::array<int, 3> mode(std::size_t q) const;
  // Physical wavevector 2 pi n / L.
  std::array<double, 3> wavevector(std::size_t q) const;
  double wavenumber(std::size_t q) const;
  // True if |n_a| <= M/3 on every axis (2/3 rule).
  bool kept_by_dealias(std::size_t q) const;
  // Multiplier of d/dx_a: i k_a, zero on the Nyquist plane of axis a.
  cplx derivative_symbol(std::size_t q, int axis) const;

 private:
  Box box_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
};

GridField spectral_derivative(const Spectral& sp, const GridField& f, int axis);
VectorField spectral_gradient(const Spectral& sp, const GridField& f);

}  // namespace rmf::fields
