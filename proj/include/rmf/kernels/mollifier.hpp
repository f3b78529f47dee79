#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace rmf::kernels {

// Radially symmetric probability density xi on the unit ball of R^3,
// together with what the kernel construction needs from it: the radial
// Fourier transform F[xi](k), the self-convolution chi = xi * xi (support
// radius 2) and the running first moment G(t) = int_0^t xi(s) s ds.
class MollifierProfile {
 public:
  // `shape` is any smooth nonnegative function on [0, 1) vanishing at 1; it
  // is normalized to unit mass in R^3.
  MollifierProfile(std::string name, std::function<double(double)> shape);

  // exp(-1/(1-r^2)) on r < 1, normalized. Constructed once per process.
  static std::shared_ptr<const MollifierProfile> standard_bump();

  // Lookup by name for table import. Only built-in profiles are registered.
  static std::shared_ptr<const MollifierProfile> by_name(const std::string& name);

  const std::string& name() const { return name_; }
  double support_radius() const { return 1.0; }

  double operator()(double r) const;          // xi(r)
  double fourier(double k) const;             // F[xi](k), k >= 0
  double chi(double r) const;                 // (xi * xi)(r)
  double first_moment_cumulative(double t) const;  // G(t)

  // 4 pi int_0^1 xi r^2 dr by adaptive quadrature (should be 1).
  double mass() const;
  // 4 pi int_0^2 chi r^2 dr (should be 1).
  double chi_mass() const;

  // Largest k on the Fourier table; beyond it F[xi] is treated as zero.
  double fourier_cutoff() const { return fourier_kmax_; }
  // max |F[xi]| over the last tabulated stretch, the size of the dropped tail.
  double fourier_tail_bound() const { return fourier_tail_bound_; }

 private:
  double chi_direct(double r) const;

  std::string name_;
  std::function<double(double)> shape_;
  double norm_ = 1.0;

  double g_step_ = 0.0;
  std::vector<double> g_nodes_;
  double chi_step_ = 0.0;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> chi_spline_;
  double fourier_kmax_ = 0.0;
  double fourier_tail_bound_ = 0.0;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> fourier_spline_;
};

}  // namespace rmf::kernels
