#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rmf/core/vec3.hpp"

namespace rmf::fields {

// Periodic cube [-L/2, L/2)^3 sampled at M points per axis. Node (i, j, k)
// sits at (-L/2 + i h, -L/2 + j h, -L/2 + k h), h = L / M; storage is
// row-major with k fastest.
class Box {
 public:
  Box(double L, std::size_t M);

  double L() const { return L_; }
  std::size_t M() const { return M_; }
  double h() const { return L_ / static_cast<double>(M_); }
  double cell_volume() const { return h() * h() * h(); }
  std::size_t size() const { return M_ * M_ * M_; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * M_ + j) * M_ + k; }
  double coordinate(std::size_t i) const { return -0.5 * L_ + static_cast<double>(i) * h(); }
  Vec3 node(std::size_t i, std::size_t j, std::size_t k) const { return {coordinate(i), coordinate(j), coordinate(k)}; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double L_;
  std::size_t M_;
};

struct GridField {
  explicit GridField(const Box& b, double t = 0.0) : box(b), values(b.size(), 0.0), time(t) {}

  Box box;
  std::vector<double> values;
  double time;

  double& operator[](std::size_t n) { return values[n]; }
  double operator[](std::size_t n) const { return values[n]; }
};

struct VectorField {
  explicit VectorField(const Box& b, double t = 0.0) : box(b), time(t) {
    for (auto& c : comp) c.assign(b.size(), 0.0);
  }

  Box box;
  std::array<std::vector<double>, 3> comp;
  double time;
};

// Throws DomainError unless the boxes match.
void require_same_box(const Box& a, const Box& b, const char* what);

}  // namespace rmf::fields
