#pragma once

#include <string>
#include <vector>

#include "rmf/core/vec3.hpp"
#include "rmf/fields/grid.hpp"

namespace rmf::fields {

struct GaussianComponent {
  double weight = 1.0;
  Vec3 mean{};
  double std = 1.0;
};

// Isotropic Gaussian or a finite Gaussian mixture on R^3. The same object
// renders the PDE initial field and samples the particle initial data, so
// both sides see one density.
class InitialDensity {
 public:
  static InitialDensity gaussian(double std, Vec3 mean = {});
  // Weights are normalized to sum 1.
  static InitialDensity mixture(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const { return components_; }

  double operator()(const Vec3& x) const;
  // Node samples rescaled so that the grid quadrature equals 1 exactly.
  GridField render(const Box& box) const;
  // A draw from the density given a uniform u in (0, 1) (component choice)
  // and a standard normal 3-vector g.
  Vec3 transform(double u, const Vec3& g) const;

  // Free-space heat evolution exp(s sigma Laplacian) of the density: every
  // component variance grows by 2 sigma s.
  InitialDensity heat_evolved(double sigma, double s) const;

  std::string describe() const;

 private:
  explicit InitialDensity(std::vector<GaussianComponent> c) : components_(std::move(c)) {}
  std::vector<GaussianComponent> components_;
};

}  // namespace rmf::fields
