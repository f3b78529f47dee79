#pragma once

#include <string>
#include <vector>

#include "rmf/core/vec3.hpp"
#include "rmf/fields/grid.hpp"
#include "rmf/fields/grid_kernel.hpp"
#include "rmf/fields/solvers.hpp"
#include "rmf/fields/spectral.hpp"
#include "rmf/particles/ensemble.hpp"

namespace rmf::statistics {

// Smooth observables phi with closed-form value and gradient.
class TestFunction {
 public:
  enum class Kind { constant, gaussian, windowed_linear };

  // exp(-|x - c|^2 / (2 w^2))
  static TestFunction gaussian(std::string id, Vec3 center, double width);
  // (d . x) exp(-|x|^2 / (2 w^2))
  static TestFunction windowed_linear(std::string id, Vec3 direction, double width);
  static TestFunction constant(std::string id, double value);

  // Centered, offset and wide Gaussians plus one windowed linear function.
  static std::vector<TestFunction> default_set();

  const std::string& id() const { return id_; }
  Kind kind() const { return kind_; }
  double operator()(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  fields::GridField render(const fields::Box& box) const;
  std::string describe() const;

 private:
  TestFunction(std::string id, Kind k, Vec3 c, Vec3 d, double w, double v)
      : id_(std::move(id)), kind_(k), center_(c), direction_(d), width_(w), value_(v) {}

  std::string id_;
  Kind kind_;
  Vec3 center_, direction_;
  double width_, value_;
};

// sqrt(N) ((1/N) sum phi(X_i) - ubar_phi), ubar_phi = <ubar, phi> on the grid.
double fluctuation_pairing(const particles::ParticleArray& X, double ubar_phi, const TestFunction& phi);
double fluctuation_pairing(const particles::ParticleArray& X, const fields::GridField& ubar, const TestFunction& phi);

struct CltVariance {
  double initial_term = 0.0;   // <u0, T(0)^2> - <u0, T(0)>^2
  double integral_term = 0.0;  // 2 sigma int_0^t <u(s), |grad T(s)|^2> ds
  double total() const { return initial_term + integral_term; }
};

// Variance of the limiting fluctuation <F(t), phi>, with T = T_phi^t the
// backward dual about u_traj; the time integral uses the trapezoid rule over
// the dual checkpoints.
CltVariance clt_target_variance(const fields::GridField& phi, double t, const fields::Trajectory& u_traj,
                                const fields::Spectral& sp, const fields::GridKernel& K, const fields::PdeConfig& cfg);

}  // namespace rmf::statistics
