#include "rmf/statistics/fluctuations.hpp"

#include <cmath>
#include <cstdio>

#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"

namespace rmf::statistics {

TestFunction TestFunction::gaussian(std::string id, Vec3 center, double width) {
  if (!(width > 0.0)) throw DomainError("TestFunction: width must be positive");
  return TestFunction(std::move(id), Kind::gaussian, center, {}, width, 1.0);
}

TestFunction TestFunction::windowed_linear(std::string id, Vec3 direction, double width) {
  if (!(width > 0.0)) throw DomainError("TestFunction: width must be positive");
  return TestFunction(std::move(id), Kind::windowed_linear, {}, direction, width, 1.0);
}

TestFunction TestFunction::constant(std::string id, double value) {
  return TestFunction(std::move(id), Kind::constant, {}, {}, 1.0, value);
}

std::vector<TestFunction> TestFunction::default_set() {
  return {gaussian("gauss_center", {0.0, 0.0, 0.0}, 0.5), gaussian("gauss_offset", {0.7, 0.0, 0.0}, 0.6),
          gaussian("gauss_wide", {0.0, 0.0, 0.0}, 1.0), windowed_linear("linear_window", {1.0, 0.0, 0.0}, 1.0)};
}

double TestFunction::operator()(const Vec3& x) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::gaussian: {
      const Vec3 d = x - center_;
      return std::exp(-dot(d, d) / (2.0 * width_ * width_));
    }
    case Kind::windowed_linear:
      return dot(direction_, x) * std::exp(-dot(x, x) / (2.0 * width_ * width_));
  }
  return 0.0;
}

Vec3 TestFunction::gradient(const Vec3& x) const {
  const double w2 = width_ * width_;
  switch (kind_) {
    case Kind::constant:
      return {};
    case Kind::gaussian: {
      const Vec3 d = x - center_;
      return (-std::exp(-dot(d, d) / (2.0 * w2)) / w2) * d;
    }
    case Kind::windowed_linear: {
      const double e = std::exp(-dot(x, x) / (2.0 * w2));
      return e * direction_ - (dot(direction_, x) * e / w2) * x;
    }
  }
  return {};
}

fields::GridField TestFunction::render(const fields::Box& box) const {
  fields::GridField f(box);
  const std::size_t M = box.M();
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < M; ++k) f[box.index(i, j, k)] = (*this)(box.node(i, j, k));
  return f;
}

std::string TestFunction::describe() const {
  char buf[256];
  switch (kind_) {
    case Kind::constant:
      std::snprintf(buf, sizeof buf, "constant(%.17g)", value_);
      break;
    case Kind::gaussian:
      std::snprintf(buf, sizeof buf, "gaussian(center=(%.17g,%.17g,%.17g),width=%.17g)", center_.x, center_.y,
                    center_.z, width_);
      break;
    case Kind::windowed_linear:
      std::snprintf(buf, sizeof buf, "windowed_linear(direction=(%.17g,%.17g,%.17g),width=%.17g)", direction_.x,
                    direction_.y, direction_.z, width_);
      break;
  }
  return buf;
}

double fluctuation_pairing(const particles::ParticleArray& X, double ubar_phi, const TestFunction& phi) {
  const std::size_t N = X.size();
  if (N == 0) throw DomainError("fluctuation_pairing: empty ensemble");
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += phi(X[i]);
  const double n = static_cast<double>(N);
  return std::sqrt(n) * (s / n - ubar_phi);
}

double fluctuation_pairing(const particles::ParticleArray& X, const fields::GridField& ubar, const TestFunction& phi) {
  return fluctuation_pairing(X, fields::inner(ubar, phi.render(ubar.box)), phi);
}

CltVariance clt_target_variance(const fields::GridField& phi, double t, const fields::Trajectory& u_traj,
                                const fields::Spectral& sp, const fields::GridKernel& K,
                                const fields::PdeConfig& cfg) {
  const fields::GridField u0 = fields::density_at(u_traj, 0.0);
  CltVariance v;
  auto initial = [&](const fields::GridField& T0) {
    fields::GridField sq(T0.box);
    for (std::size_t i = 0; i < sq.values.size(); ++i) sq[i] = T0[i] * T0[i];
    const double m = fields::inner(u0, T0);
    return fields::inner(u0, sq) - m * m;
  };
  if (t <= 0.0) {
    v.initial_term = initial(phi);
    return v;
  }
  const fields::Trajectory dual = fields::solve_backward_dual(phi, t, u_traj, sp, K, cfg);
  v.initial_term = initial(dual.fields.front());

  const double hv = phi.box.cell_volume();
  std::vector<double> integrand(dual.times.size());
  for (std::size_t j = 0; j < dual.times.size(); ++j) {
    const fields::GridField u = fields::density_at(u_traj, dual.times[j]);
    const fields::VectorField g = fields::spectral_gradient(sp, dual.fields[j]);
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      s += u[i] * (g.comp[0][i] * g.comp[0][i] + g.comp[1][i] * g.comp[1][i] + g.comp[2][i] * g.comp[2][i]);
    }
    integrand[j] = s * hv;
  }
  double integral = 0.0;
  for (std::size_t j = 1; j < integrand.size(); ++j) {
    integral += 0.5 * (dual.times[j] - dual.times[j - 1]) * (integrand[j] + integrand[j - 1]);
  }
  v.integral_term = 2.0 * cfg.sigma * integral;
  return v;
}

}  // namespace rmf::statistics
