#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rmf/fields/grid.hpp"
#include "rmf/fields/grid_kernel.hpp"
#include "rmf/fields/spectral.hpp"
#include "rmf/particles/ensemble.hpp"
#include "rmf/particles/pair_kernel.hpp"

namespace rmf::statistics {

// Grid quantities of one mean-field density needed by the pairwise error
// formulas: V*u, lap V*u, grad V*u and the self pairings <u, V*u>,
// <u, lap V*u>. Built once per checkpoint and shared by all realizations.
class MeanFieldContext {
 public:
  MeanFieldContext(const fields::GridField& ubar, const fields::Spectral& sp, const fields::GridKernel& K,
                   const particles::PairKernel& pk);

  const particles::PairKernel& pair_kernel() const { return *pk_; }
  double L() const { return Vu_.box.L(); }
  double time() const { return Vu_.time; }

  // Lagrange-6 samples.
  double V_conv(const Vec3& x) const;
  double lapV_conv(const Vec3& x) const;
  Vec3 gradV_conv(const Vec3& x) const;

  double self_V() const { return uVu_; }
  double self_lapV() const { return uLVu_; }

 private:
  const particles::PairKernel* pk_;
  fields::GridField Vu_, LVu_;
  std::array<fields::GridField, 3> GVu_;
  double uVu_, uLVu_;
};

// (1/N^2) sum_{i,j} V(X_i - X_j) and the same for lap V, diagonal included.
// Deterministic: per-i partial sums over j > i, combined in index order.
struct PairSums {
  double V = 0.0;
  double lapV = 0.0;
};
PairSums pair_sums(const particles::ParticleArray& X, const particles::PairKernel& pk, double L);

// ||Z * (mu - u)||^2 = (1/N^2) sum V(X_i - X_j) - (2/N) sum (V*u)(X_i) + <u, V*u>.
// eta is the caller's N^{-beta}; a mismatch with the kernel throws.
double l2_error_sq(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta);
// ||grad Z * (mu - u)||^2 = -<mu - u, lap V * (mu - u)>.
double h1_error_sq(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta);

struct L2H1 {
  double l2 = 0.0;
  double h1 = 0.0;
};
// Both functionals from one pass over the pairs.
L2H1 error_functionals(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta);

struct ErrorSample {
  std::uint64_t realization = 0;
  std::vector<double> times;
  std::vector<double> l2_err_sq;
  std::vector<double> h1_err_sq;
  double sup_l2 = 0.0;
  double h1_integral = 0.0;  // trapezoid rule over the checkpoints
  std::size_t negative_flags = 0;  // values below -1e-12

  void append(double t, const L2H1& e);
  // sup_t ||f - g||^2 + sigma int ||grad (f - g)||^2 dt
  double rate_statistic(double sigma) const { return sup_l2 + sigma * h1_integral; }
};

// Lemma sets B (psi = grad V) and A (phi = V) at one time:
//   max_i |(1/N) sum_j psi(Xbar_i - Xbar_j) - (psi * u)(Xbar_i)|.
struct LlnResult {
  double b_deviation = 0.0;
  bool b_exceeded = false;
  double a_deviation = 0.0;
  bool a_exceeded = false;
};
LlnResult lln_exceedance(const particles::ParticleArray& Xbar, const MeanFieldContext& ctx, double theta);

}  // namespace rmf::statistics
