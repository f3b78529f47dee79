#include "rmf/kernels/riesz.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rmf/core/errors.hpp"

namespace rmf::kernels {

RieszParams::RieszParams(int d, double lambda) : d_(d), lambda_(lambda) {
  if (d < 3) throw DomainError("RieszParams: dimension must be >= 3, got " + std::to_string(d));
  if (!(lambda > 0.0 && lambda < d - 2.0)) {
    throw DomainError("RieszParams: sub-Coulomb condition 0 < lambda < d-2 violated (lambda = " +
                      std::to_string(lambda) + ", d = " + std::to_string(d) + ")");
  }
}

double riesz_phi(double r, const RieszParams& params) {
  if (!(r > 0.0)) throw DomainError("riesz_phi: Phi is singular at r <= 0");
  return std::pow(r, -params.lambda());
}

double riesz_fourier_constant(int d, double a) {
  if (!(a > 0.0 && a < d)) throw DomainError("riesz_fourier_constant: need 0 < a < d");
  return std::pow(std::numbers::pi, 0.5 * d) * std::pow(2.0, d - a) * std::tgamma(0.5 * (d - a)) /
         std::tgamma(0.5 * a);
}

double riesz_symbol(double k, const RieszParams& params) {
  if (k <= 0.0) return 0.0;
  return riesz_fourier_constant(params.d(), params.lambda()) * std::pow(k, params.lambda() - params.d());
}

double psi_constant(const RieszParams& params) {
  // F[Psi] = sqrt(C_{lambda,d}) |k|^{(lambda-d)/2} = c C_{mu,d} |k|^{mu-d}, mu = (lambda+d)/2.
  const double c_lambda = riesz_fourier_constant(params.d(), params.lambda());
  const double c_mu = riesz_fourier_constant(params.d(), params.psi_exponent());
  return std::sqrt(c_lambda) / c_mu;
}

}  // namespace rmf::kernels
