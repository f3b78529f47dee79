#include "rmf/fields/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rmf/core/errors.hpp"

namespace rmf::fields {

double quadrature(const GridField& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.box.cell_volume();
}

double inner(const GridField& a, const GridField& b) {
  require_same_box(a.box, b.box, "inner");
  double acc = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) acc += a[n] * b[n];
  return acc * a.box.cell_volume();
}

double lp_norm(const GridField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  double acc = 0.0;
  if (p == 1.0) {
    for (double v : f.values) acc += std::abs(v);
    return acc * f.box.cell_volume();
  }
  if (p == 2.0) {
    for (double v : f.values) acc += v * v;
    return std::sqrt(acc * f.box.cell_volume());
  }
  for (double v : f.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.box.cell_volume(), 1.0 / p);
}

double grad_norm_sq(const Spectral& sp, const GridField& f) {
  const auto g = spectral_gradient(sp, f);
  double acc = 0.0;
  for (const auto& c : g.comp)
    for (double v : c) acc += v * v;
  return acc * f.box.cell_volume();
}

double field_min(const GridField& f) { return *std::min_element(f.values.begin(), f.values.end()); }
double field_max(const GridField& f) { return *std::max_element(f.values.begin(), f.values.end()); }

double boundary_shell_max(const GridField& f) {
  const std::size_t M = f.box.M();
  auto outer = [M](std::size_t i) { return i == 0 || i == M - 1; };
  double m = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < M; ++k)
        if (outer(i) || outer(j) || outer(k)) m = std::max(m, std::abs(f[f.box.index(i, j, k)]));
  return m;
}

namespace {

struct Stencil {
  std::size_t base;  // index of the node at or below x
  double t;          // fractional offset in [0, 1)
};

Stencil locate(double x, const Box& b) {
  const double u = (wrap_coordinate(x, b.L()) + 0.5 * b.L()) / b.h();
  double fl = std::floor(u);
  double t = u - fl;
  auto base = static_cast<std::size_t>(fl);
  if (base >= b.M()) {  // u rounded up to exactly M
    base = 0;
    t = 0.0;
  }
  return {base, t};
}

template <class Get>
double trilinear(const Box& b, const Vec3& x, Get get) {
  const std::size_t M = b.M();
  const Stencil sx = locate(x.x, b), sy = locate(x.y, b), sz = locate(x.z, b);
  const std::size_t i1 = (sx.base + 1) % M, j1 = (sy.base + 1) % M, k1 = (sz.base + 1) % M;
  const double c00 = get(b.index(sx.base, sy.base, sz.base)) * (1 - sz.t) + get(b.index(sx.base, sy.base, k1)) * sz.t;
  const double c01 = get(b.index(sx.base, j1, sz.base)) * (1 - sz.t) + get(b.index(sx.base, j1, k1)) * sz.t;
  const double c10 = get(b.index(i1, sy.base, sz.base)) * (1 - sz.t) + get(b.index(i1, sy.base, k1)) * sz.t;
  const double c11 = get(b.index(i1, j1, sz.base)) * (1 - sz.t) + get(b.index(i1, j1, k1)) * sz.t;
  const double c0 = c00 * (1 - sy.t) + c01 * sy.t;
  const double c1 = c10 * (1 - sy.t) + c11 * sy.t;
  return c0 * (1 - sx.t) + c1 * sx.t;
}

// Lagrange weights on nodes -2..3 at offset t.
std::array<double, 6> lagrange6(double t) {
  std::array<double, 6> w{};
  for (int d = -2; d <= 3; ++d) {
    double p = 1.0;
    for (int e = -2; e <= 3; ++e)
      if (e != d) p *= (t - e) / static_cast<double>(d - e);
    w[d + 2] = p;
  }
  return w;
}

}  // namespace

double sample_trilinear(const GridField& f, const Vec3& x) {
  return trilinear(f.box, x, [&](std::size_t n) { return f[n]; });
}

Vec3 sample_trilinear(const VectorField& f, const Vec3& x) {
  return {trilinear(f.box, x, [&](std::size_t n) { return f.comp[0][n]; }),
          trilinear(f.box, x, [&](std::size_t n) { return f.comp[1][n]; }),
          trilinear(f.box, x, [&](std::size_t n) { return f.comp[2][n]; })};
}

double sample_lagrange6(const GridField& f, const Vec3& x) {
  const Box& b = f.box;
  const std::size_t M = b.M();
  const Stencil s[3] = {locate(x.x, b), locate(x.y, b), locate(x.z, b)};
  const auto wx = lagrange6(s[0].t), wy = lagrange6(s[1].t), wz = lagrange6(s[2].t);
  std::array<std::size_t, 6> ix{}, iy{}, iz{};
  for (int d = 0; d < 6; ++d) {
    ix[d] = (s[0].base + M + d - 2) % M;
    iy[d] = (s[1].base + M + d - 2) % M;
    iz[d] = (s[2].base + M + d - 2) % M;
  }
  double acc = 0.0;
  for (int a = 0; a < 6; ++a) {
    double ay = 0.0;
    for (int c = 0; c < 6; ++c) {
      double az = 0.0;
      const std::size_t row = b.index(ix[a], iy[c], 0);
      for (int e = 0; e < 6; ++e) az += wz[e] * f[row + iz[e]];
      ay += wy[c] * az;
    }
    acc += wx[a] * ay;
  }
  return acc;
}

double smallness_threshold(const kernels::RieszParams& params, double sigma) {
  const double n = params.d();
  const double lambda = params.lambda();
  const double mu = lambda + 2.0;
  const double p = n / (n - 2.0);
  const double r = params.critical_exponent();
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);  // |S^{n-1}|
  const double a = mu / n;
  const double hls = n / ((n - mu) * p * r) * std::pow(sphere / n, a) *
                     (std::pow(a / (1.0 - 1.0 / p), a) + std::pow(a / (1.0 - 1.0 / r), a));
  const double S = std::pow(std::tgamma(n) / std::tgamma(0.5 * n), 1.0 / n) / std::sqrt(std::numbers::pi * n * (n - 2.0));
  const double c_prime = std::abs(lambda * (lambda + 2.0 - n)) * hls * S * S;
  return 4.0 * sigma / (r * c_prime);
}

}  // namespace rmf::fields
