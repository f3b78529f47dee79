#pragma once

#include <array>
#include <cmath>

namespace rmf {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr double operator[](int c) const { return c == 0 ? x : (c == 1 ? y : z); }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Wrap a coordinate onto [-L/2, L/2).
inline double wrap_coordinate(double v, double L) {
  double w = v - L * std::floor(v / L + 0.5);
  if (w >= 0.5 * L) w -= L;  // floor rounding at the upper edge
  return w;
}

inline Vec3 wrap(const Vec3& p, double L) {
  return {wrap_coordinate(p.x, L), wrap_coordinate(p.y, L), wrap_coordinate(p.z, L)};
}

// Minimum-image difference a - b on a torus of side L.
inline Vec3 minimum_image(const Vec3& a, const Vec3& b, double L) {
  return wrap(a - b, L);
}

}  // namespace rmf
