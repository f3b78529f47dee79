#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "rmf/core/vec3.hpp"
#include "rmf/kernels/mollifier.hpp"
#include "rmf/kernels/radial_table.hpp"
#include "rmf/kernels/riesz.hpp"

namespace rmf::kernels {

struct TableConfig {
  std::size_t nodes = 4096;
  double r_min_factor = 1e-3;   // r_min = factor * eta
  double r_max_factor = 100.0;  // r_max = max(factor * eta, floor)
  double r_max_floor = 50.0;
  // Radii (in units of eta) checked against the Fourier route during build.
  double check_from = 0.5;
  double check_to = 10.0;
  std::size_t check_points = 12;
  double check_tolerance = 1e-3;
};

// Tabulated V^eta = chi^eta * Phi, its radial derivative and Laplacian,
// and Z^eta = xi^eta * Psi, all at one mollification length eta.
// Immutable after construction.
class RadialKernelSet {
 public:
  RadialKernelSet(RieszParams params, double eta, std::shared_ptr<const MollifierProfile> mollifier,
                  RadialTable V, RadialTable dV, RadialTable lapV, RadialTable Z);

  const RieszParams& params() const { return params_; }
  double eta() const { return eta_; }
  const MollifierProfile& mollifier() const { return *mollifier_; }
  std::shared_ptr<const MollifierProfile> mollifier_ptr() const { return mollifier_; }
  double c_psi() const { return c_psi_; }

  const RadialTable& V() const { return V_; }
  const RadialTable& dV() const { return dV_; }
  const RadialTable& lapV() const { return lapV_; }
  const RadialTable& Z() const { return Z_; }

  // F[V^eta](k) = F[xi](eta k)^2 C_{lambda,3} k^{lambda-3}; 0 at k = 0.
  double symbol_V(double k) const;
  // F[Z^eta](k) = F[xi](eta k) sqrt(C_{lambda,3}) k^{(lambda-3)/2}; 0 at k = 0.
  double symbol_Z(double k) const;

 private:
  RieszParams params_;
  double eta_;
  std::shared_ptr<const MollifierProfile> mollifier_;
  RadialTable V_, dV_, lapV_, Z_;
  double c_psi_;
  double symbol_constant_;
};

// Builds every table by radial convolution quadrature and verifies V^eta
// against the independent Fourier (sine-transform) route on
// [check_from, check_to] * eta. Throws NumericalError if the routes
// disagree beyond check_tolerance, DomainError for bad input.
RadialKernelSet build_kernel_set(const RieszParams& params, double eta,
                                 std::shared_ptr<const MollifierProfile> mollifier = MollifierProfile::standard_bump(),
                                 const TableConfig& cfg = {});

// V^eta(r) by the Fourier route: (1/(2 pi^2 r)) int_0^inf F[V^eta](k) k sin(kr) dk.
double fourier_route_V(const RieszParams& params, double eta, const MollifierProfile& mollifier, double r);

double eval_V(const RadialKernelSet& ks, double r);
Vec3 eval_gradV(const RadialKernelSet& ks, const Vec3& x);
double eval_lapV(const RadialKernelSet& ks, double r);
double eval_Z(const RadialKernelSet& ks, double r);
// Radial Hessian eigenvalue bound max(|V''(r)|, |V'(r)/r|).
double eval_hessian_bound(const RadialKernelSet& ks, double r);

// ||Z^eta||_{L^2(R^3)} by radial quadrature with an analytic tail.
double z_l2_norm(const RadialKernelSet& ks);

enum class ScalingQuantity { V, gradV, hessV, Z_L2 };

struct ScalingReport {
  ScalingQuantity quantity;
  std::vector<double> N;
  std::vector<double> eta;
  std::vector<double> norm;
  double slope = 0.0;           // least squares d log(norm) / d log N
  double predicted_slope = 0.0;  // beta*(lambda+k), or beta*lambda/2 for Z
};

// Sup-norms (over the table nodes) of V^eta, (V^eta)', D^2 V^eta or the L^2
// norm of Z^eta at eta = N^{-beta}, and their fitted growth rate in N.
ScalingReport verify_scaling_bounds(const RieszParams& params, double beta, const std::vector<double>& N_list,
                                    ScalingQuantity quantity, const TableConfig& cfg = {});

}  // namespace rmf::kernels
