#pragma once

namespace rmf::kernels {

// Riesz exponent and spatial dimension. Construction enforces the
// sub-Coulomb window 0 < lambda < d - 2.
class RieszParams {
 public:
  RieszParams(int d, double lambda);

  int d() const { return d_; }
  double lambda() const { return lambda_; }

  // Exponent of the square-root kernel Psi(x) = c |x|^{-(lambda+d)/2}.
  double psi_exponent() const { return 0.5 * (lambda_ + d_); }
  // p* = d / (d - lambda).
  double critical_exponent() const { return d_ / (d_ - lambda_); }

  friend bool operator==(const RieszParams&, const RieszParams&) = default;

 private:
  int d_;
  double lambda_;
};

// Phi(r) = r^{-lambda}. Throws DomainError for r <= 0.
double riesz_phi(double r, const RieszParams& params);

// C_{a,d} in F[|x|^{-a}](k) = C_{a,d} |k|^{a-d}, valid for 0 < a < d, with
// F[f](k) = int f(x) e^{-i k.x} dx.
double riesz_fourier_constant(int d, double a);

// Fourier symbol of Phi: C_{lambda,d} |k|^{lambda-d}; zero at k = 0 (the
// singular mean mode is dropped on periodic grids).
double riesz_symbol(double k, const RieszParams& params);

// c_{d,lambda} with Psi * Psi = Phi for Psi = c |x|^{-(lambda+d)/2}.
double psi_constant(const RieszParams& params);

}  // namespace rmf::kernels
