#include "rmf/fields/initial_density.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rmf/core/errors.hpp"

namespace rmf::fields {

InitialDensity InitialDensity::gaussian(double std, Vec3 mean) {
  return mixture({GaussianComponent{1.0, mean, std}});
}

InitialDensity InitialDensity::mixture(std::vector<GaussianComponent> components) {
  if (components.empty()) throw DomainError("InitialDensity: no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.std > 0.0)) throw DomainError("InitialDensity: weights and widths must be positive");
    total += c.weight;
  }
  for (auto& c : components) c.weight /= total;
  return InitialDensity(std::move(components));
}

double InitialDensity::operator()(const Vec3& x) const {
  double acc = 0.0;
  for (const auto& c : components_) {
    const Vec3 d = x - c.mean;
    const double s2 = c.std * c.std;
    acc += c.weight * std::exp(-0.5 * dot(d, d) / s2) / std::pow(2.0 * std::numbers::pi * s2, 1.5);
  }
  return acc;
}

GridField InitialDensity::render(const Box& box) const {
  GridField f(box);
  const std::size_t M = box.M();
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < M; ++k) f[box.index(i, j, k)] = (*this)(box.node(i, j, k));
  double mass = 0.0;
  for (double v : f.values) mass += v;
  mass *= box.cell_volume();
  for (double& v : f.values) v /= mass;
  return f;
}

Vec3 InitialDensity::transform(double u, const Vec3& g) const {
  std::size_t c = 0;
  double cum = components_[0].weight;
  while (u > cum && c + 1 < components_.size()) cum += components_[++c].weight;
  return components_[c].mean + components_[c].std * g;
}

InitialDensity InitialDensity::heat_evolved(double sigma, double s) const {
  auto c = components_;
  for (auto& comp : c) comp.std = std::sqrt(comp.std * comp.std + 2.0 * sigma * s);
  return InitialDensity(std::move(c));
}

std::string InitialDensity::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (components_.size() == 1) {
    const auto& c = components_[0];
    os << "gaussian(std=" << c.std << ",mean=" << c.mean.x << "," << c.mean.y << "," << c.mean.z << ")";
    return os.str();
  }
  os << "mixture(";
  for (std::size_t n = 0; n < components_.size(); ++n) {
    const auto& c = components_[n];
    if (n) os << ";";
    os << "w=" << c.weight << ",std=" << c.std << ",mean=" << c.mean.x << "," << c.mean.y << "," << c.mean.z;
  }
  os << ")";
  return os.str();
}

}  // namespace rmf::fields
