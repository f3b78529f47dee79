#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"
#include "rmf/fields/grid_kernel.hpp"
#include "rmf/fields/initial_density.hpp"
#include "rmf/fields/solvers.hpp"
#include "rmf/fields/trajectory_io.hpp"
#include "rmf/kernels/kernel_set.hpp"

using namespace rmf;
using namespace rmf::fields;

namespace {

constexpr double kPi = std::numbers::pi;

GridField render(const Box& b, const std::function<double(const Vec3&)>& f) {
  GridField g(b);
  for (std::size_t i = 0; i < b.M(); ++i)
    for (std::size_t j = 0; j < b.M(); ++j)
      for (std::size_t k = 0; k < b.M(); ++k) g[b.index(i, j, k)] = f(b.node(i, j, k));
  return g;
}

double max_abs_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

double heat_error(double dt, std::size_t M = 64) {
  const Box box(16.0, M);
  const auto u0 = InitialDensity::gaussian(1.0);
  PdeConfig cfg;
  cfg.dt = dt;
  cfg.T_end = 0.5;
  cfg.interaction = false;
  const auto traj = solve_limit(u0.render(box), kernels::RieszParams(3, 0.5), cfg);
  return max_abs_diff(traj.fields.back(), u0.heat_evolved(cfg.sigma, 0.5).render(box));
}

}  // namespace

TEST_CASE("box validation") {
  CHECK_THROWS_AS(Box(16.0, 8), DomainError);
  CHECK_THROWS_AS(Box(16.0, 48), DomainError);
  CHECK_THROWS_AS(Box(0.0, 64), DomainError);
  const Box b(16.0, 32);
  CHECK(b.h() == 0.5);
  CHECK(b.coordinate(0) == -8.0);
  CHECK(b.coordinate(16) == 0.0);
}

TEST_CASE("quadrature, inner products and norms") {
  const Box b(16.0, 32);
  const auto u = InitialDensity::gaussian(1.0).render(b);
  CHECK(std::abs(quadrature(u) - 1.0) < 1e-10);
  CHECK(inner(u, u) == doctest::Approx(std::pow(lp_norm(u, 2.0), 2)).epsilon(1e-14));
  CHECK(lp_norm(u, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp_norm(u, std::numeric_limits<double>::infinity()) == doctest::Approx(std::pow(2 * kPi, -1.5)).epsilon(1e-9));
  // ||Gaussian||_p^p = (2 pi)^{3(1-p)/2} p^{-3/2} for unit variance.
  const double p = 1.2;
  CHECK(lp_norm(u, p) == doctest::Approx(std::pow(std::pow(2 * kPi, 1.5 * (1 - p)) * std::pow(p, -1.5), 1 / p)).epsilon(1e-9));
  CHECK_THROWS_AS(inner(u, GridField(Box(16.0, 16))), DomainError);

  const Spectral sp(b);
  const auto wave = render(b, [&](const Vec3& x) { return std::sin(2 * kPi * x.x / b.L()); });
  CHECK(grad_norm_sq(sp, wave) == doctest::Approx(std::pow(2 * kPi / b.L(), 2) * std::pow(b.L(), 3) / 2).epsilon(1e-12));
}

TEST_CASE("spectral derivative and dealias mask") {
  const Box b(16.0, 32);
  const Spectral sp(b);
  const double k = 2 * kPi / b.L() * 3;
  const auto f = render(b, [&](const Vec3& x) { return std::sin(k * x.y) * std::cos(2 * kPi / b.L() * x.z); });
  const auto dfy = spectral_derivative(sp, f, 1);
  const auto exact = render(b, [&](const Vec3& x) { return k * std::cos(k * x.y) * std::cos(2 * kPi / b.L() * x.z); });
  CHECK(max_abs_diff(dfy, exact) < 1e-12);

  std::size_t kept = 0;
  for (std::size_t q = 0; q < sp.spectral_size(); ++q) kept += sp.kept_by_dealias(q);
  // |n| <= 10 on the full axes (21 values), n = 0..10 on the half axis.
  CHECK(kept == 21u * 21u * 11u);
}

TEST_CASE("sampling") {
  const Box b(16.0, 32);
  const auto u = InitialDensity::gaussian(1.5, {0.3, -0.2, 0.1}).render(b);
  const Vec3 node = b.node(17, 5, 30);
  CHECK(sample_trilinear(u, node) == u[b.index(17, 5, 30)]);
  CHECK(sample_lagrange6(u, node) == u[b.index(17, 5, 30)]);

  // Degree-5 polynomials per axis are reproduced by the 6-point rule.
  const auto poly = render(b, [](const Vec3& x) { return std::pow(x.x, 5) - 3 * x.y * x.y * x.z + x.z; });
  const Vec3 p{0.37, -1.21, 2.05};
  CHECK(sample_lagrange6(poly, p) == doctest::Approx(std::pow(p.x, 5) - 3 * p.y * p.y * p.z + p.z).epsilon(1e-11));

  // Interpolation error on a smooth density: Lagrange-6 is far below trilinear.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  const auto dens = InitialDensity::gaussian(1.5, {0.3, -0.2, 0.1});
  const double scale = std::pow(b.cell_volume() * [&] {
    double s = 0;
    for (std::size_t i = 0; i < b.M(); ++i)
      for (std::size_t j = 0; j < b.M(); ++j)
        for (std::size_t k = 0; k < b.M(); ++k) s += dens(b.node(i, j, k));
    return s;
  }(), -1.0);
  double e_lin = 0.0, e_l6 = 0.0;
  for (int n = 0; n < 500; ++n) {
    const Vec3 x{ud(rng), ud(rng), ud(rng)};
    const double exact = dens(x) * scale;
    e_lin = std::max(e_lin, std::abs(sample_trilinear(u, x) - exact));
    e_l6 = std::max(e_l6, std::abs(sample_lagrange6(u, x) - exact));
  }
  CHECK(e_l6 < 1e-5);
  CHECK(e_l6 < 0.05 * e_lin);

  // Periodic wrap.
  CHECK(sample_trilinear(u, Vec3{0.3 + 16.0, -0.2, 0.1 - 32.0}) == doctest::Approx(sample_trilinear(u, Vec3{0.3, -0.2, 0.1})).epsilon(1e-13));
}

TEST_CASE("initial density sampling transform") {
  const auto mix = InitialDensity::mixture({{1.0, {-1, 0, 0}, 0.5}, {3.0, {2, 0, 0}, 0.7}});
  CHECK(mix.components()[0].weight == doctest::Approx(0.25));
  CHECK(mix.transform(0.1, {0, 0, 0}) == Vec3{-1, 0, 0});
  CHECK(mix.transform(0.9, {1, 0, 0}) == Vec3{2.7, 0, 0});
  CHECK_THROWS_AS(InitialDensity::gaussian(-1.0), DomainError);
  const auto heat = InitialDensity::gaussian(1.0).heat_evolved(0.25, 0.5);
  CHECK(heat.components()[0].std == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("heat degeneration matches the analytic solution") {
  const double e1 = heat_error(0.02);
  const double e2 = heat_error(0.01);
  const double e3 = heat_error(0.005);
  CHECK(e2 < 1e-4);
  const double slope = std::log2(e1 / e3) / 2.0;
  CHECK(slope == doctest::Approx(1.0).epsilon(0.2));
  // Refining space does not change the (temporal) error.
  CHECK(heat_error(0.01, 32) == doctest::Approx(e2).epsilon(0.05));
}

TEST_CASE("nonlocal solvers conserve mass and report monitors") {
  const Box box(16.0, 64);
  const auto u0 = InitialDensity::gaussian(1.0).render(box);
  const kernels::RieszParams params(3, 0.5);
  const auto ks = kernels::build_kernel_set(params, 0.5);
  PdeConfig cfg;
  cfg.T_end = 0.3;
  for (double kappa : {1.0, -1.0}) {
    cfg.kappa = kappa;
    const auto a = solve_intermediate(u0, ks, cfg);
    const auto b = solve_limit(u0, params, cfg);
    for (const auto* t : {&a, &b}) {
      CHECK(t->times.size() == 31);
      CHECK(t->times.front() == 0.0);
      CHECK(t->max_mass_drift < 1e-10);
      CHECK(t->positivity_violations == 0);
      for (const auto& f : t->fields) CHECK(std::abs(quadrature(f) - 1.0) < 1e-10);
    }
    CHECK(a.kernel_name == "intermediate");
    CHECK(b.kernel_name == "riesz");
  }

  cfg.save_every = 7;
  const auto c = solve_limit(u0, params, cfg);
  CHECK(c.times.size() == 6);  // 0, 7, 14, 21, 28 and the final step 30
  CHECK(c.times.back() == doctest::Approx(0.3));
}

TEST_CASE("repulsive limit: sup norm non-increasing; attractive small data: L^p* non-increasing") {
  const Box box(16.0, 32);
  const kernels::RieszParams params(3, 0.5);
  PdeConfig cfg;
  cfg.T_end = 0.5;
  cfg.kappa = -1.0;
  const auto u0 = InitialDensity::gaussian(1.0).render(box);
  const auto rep = solve_limit(u0, params, cfg);
  const auto sup = lp_series(rep, std::numeric_limits<double>::infinity());
  for (std::size_t j = 1; j < sup.size(); ++j) CHECK(sup[j] <= sup[j - 1]);

  const double threshold = smallness_threshold(params, cfg.sigma);
  CHECK(threshold > 0.0);
  CHECK(smallness_threshold(params, 2 * cfg.sigma) == doctest::Approx(2 * threshold));
  const double pstar = params.critical_exponent();
  CAPTURE(threshold);
  CAPTURE(lp_norm(u0, pstar));
  REQUIRE(lp_norm(u0, pstar) < threshold);
  cfg.kappa = 1.0;
  const auto att = solve_limit(u0, params, cfg);
  const auto lps = lp_series(att, pstar);
  for (std::size_t j = 1; j < lps.size(); ++j) CHECK(lps[j] <= lps[j - 1] * (1 + 1e-6));
}

TEST_CASE("drift field symmetry and boundedness as eta -> 0") {
  const Box box(16.0, 32);
  const Spectral sp(box);
  const auto u = InitialDensity::gaussian(1.0).render(box);
  const kernels::RieszParams params(3, 0.5);
  double prev = 0.0;
  for (double eta : {0.4, 0.2, 0.1, 0.05}) {
    const auto ks = kernels::build_kernel_set(params, eta);
    const auto a = convolve_gradient(sp, GridKernel::intermediate(sp, ks), u);
    const std::size_t c = box.index(16, 16, 16);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a.comp[k][c]) < 1e-14);
    double m = 0.0;
    for (const auto& comp : a.comp)
      for (double v : comp) m = std::max(m, std::abs(v));
    CHECK(m < 1.0);
    if (prev > 0.0) CHECK(std::abs(m / prev - 1.0) < 0.05);
    prev = m;
  }
}

TEST_CASE("truncated kernel equals the direct minimum-image sum") {
  const Box box(8.0, 16);
  const Spectral sp(box);
  const auto ks = kernels::build_kernel_set(kernels::RieszParams(3, 0.5), 0.6);
  const auto K = GridKernel::truncated(sp, ks);
  const auto u = InitialDensity::gaussian(0.8, {0.4, 0, -0.3}).render(box);
  const auto conv = convolve(sp, K, u);
  const auto grad = convolve_gradient(sp, K, u);
  const auto lap = convolve_laplacian(sp, K, u);
  for (auto [i, j, k] : {std::array<std::size_t, 3>{8, 8, 8}, {3, 11, 6}, {0, 15, 9}}) {
    const Vec3 x = box.node(i, j, k);
    double v = 0.0, l = 0.0;
    Vec3 g{};
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = 0; b < 16; ++b)
        for (std::size_t c = 0; c < 16; ++c) {
          const double w = u[box.index(a, b, c)] * box.cell_volume();
          const Vec3 d = minimum_image(x, box.node(a, b, c), box.L());
          v += w * kernels::eval_V(ks, norm(d));
          l += w * kernels::eval_lapV(ks, norm(d));
          // On the half-box planes the two images cancel.
          Vec3 gd = kernels::eval_gradV(ks, d);
          const auto at_half = [&](double z) { return std::abs(std::abs(z) - 0.5 * box.L()) < 1e-12; };
          if (at_half(d.x)) gd.x = 0;
          if (at_half(d.y)) gd.y = 0;
          if (at_half(d.z)) gd.z = 0;
          g += w * gd;
        }
    const std::size_t n = box.index(i, j, k);
    CHECK(conv[n] == doctest::Approx(v).epsilon(1e-12));
    CHECK(lap[n] == doctest::Approx(l).epsilon(1e-10));
    CHECK(grad.comp[0][n] == doctest::Approx(g.x).scale(1.0).epsilon(1e-12));
    CHECK(grad.comp[1][n] == doctest::Approx(g.y).scale(1.0).epsilon(1e-12));
    CHECK(grad.comp[2][n] == doctest::Approx(g.z).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("CFL violation reports a usable dt") {
  const Box box(16.0, 32);
  PdeConfig cfg;
  cfg.dt = 0.8;
  cfg.T_end = 1.6;
  cfg.kappa = 1.0;
  const auto u0 = InitialDensity::gaussian(0.6).render(box);
  try {
    (void)solve_limit(u0, kernels::RieszParams(3, 0.9), cfg);
    FAIL("expected CflError");
  } catch (const CflError& e) {
    CHECK(e.suggested_dt() < cfg.dt);
    cfg.dt = 0.1;
    cfg.T_end = 0.1 * std::floor(1.6 / 0.1);
    if (e.suggested_dt() < 0.1) cfg.dt = e.suggested_dt();
  }
  CHECK_THROWS_AS(solve_limit(InitialDensity::gaussian(3.0).render(box), kernels::RieszParams(3, 0.5), PdeConfig{}),
                  DomainError);  // not decayed at the boundary
}

TEST_CASE("linearized and dual solvers") {
  const Box box(16.0, 32);
  const Spectral sp(box);
  const kernels::RieszParams params(3, 0.5);
  const auto K = GridKernel::riesz(sp, params);
  PdeConfig cfg;
  cfg.T_end = 0.3;
  const auto u0 = InitialDensity::gaussian(1.0).render(box);
  const auto traj = solve_nonlocal(u0, sp, K, cfg);

  SUBCASE("zero-mass perturbation stays zero-mass") {
    auto f0 = InitialDensity::gaussian(0.8, {0.5, 0, 0}).render(box);
    for (std::size_t n = 0; n < f0.values.size(); ++n) f0[n] -= u0[n];
    const auto f = solve_linearized(f0, 0.1, 0.3, traj, sp, K, cfg);
    CHECK(std::abs(quadrature(f)) < 1e-13);
  }

  SUBCASE("without interaction the linearized flow is the heat flow") {
    PdeConfig heat = cfg;
    heat.interaction = false;
    const auto f0 = InitialDensity::gaussian(0.9).render(box);
    const auto f = solve_linearized(f0, 0.0, 0.3, traj, sp, K, heat);
    const auto ref = solve_nonlocal(f0, sp, K, heat).fields.back();
    CHECK(max_abs_diff(f, ref) < 1e-15);
  }

  SUBCASE("constants are invariant under the dual") {
    GridField phi(box);
    for (double& v : phi.values) v = 2.5;
    const auto dual = solve_backward_dual(phi, 0.3, traj, sp, K, cfg);
    CHECK(dual.times.size() == 31);
    CHECK(dual.times.front() == doctest::Approx(0.0));
    for (const auto& w : dual.fields)
      for (double v : w.values) REQUIRE(std::abs(v - 2.5) < 1e-12);
  }

  SUBCASE("adjoint pairing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int c = 0; c < 3; ++c) {
      const auto f0 = InitialDensity::gaussian(0.7 + 0.2 * std::abs(ud(rng)), {ud(rng), ud(rng), ud(rng)}).render(box);
      const Vec3 ctr{ud(rng), ud(rng), ud(rng)};
      const auto phi = render(box, [&](const Vec3& x) { const Vec3 d = x - ctr; return std::exp(-dot(d, d) / 2) * (1 + x.x); });
      const double s0 = 0.1 * c;
      const auto f = solve_linearized(f0, s0, 0.3, traj, sp, K, cfg);
      const auto dual = solve_backward_dual(phi, 0.3, traj, sp, K, cfg);
      const auto T = density_at(dual, s0);
      const double lhs = inner(f, phi), rhs = inner(f0, T);
      CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-12);
    }
  }

  SUBCASE("kernel mismatch is rejected") {
    const auto ks = kernels::build_kernel_set(params, 0.3);
    const auto K2 = GridKernel::intermediate(sp, ks);
    CHECK_THROWS_AS(solve_backward_dual(u0, 0.3, traj, sp, K2, cfg), DomainError);
  }
}

TEST_CASE("trajectory time access and persistence") {
  const Box box(16.0, 32);
  PdeConfig cfg;
  cfg.T_end = 0.05;
  cfg.save_every = 2;
  const auto u0 = InitialDensity::gaussian(1.0).render(box);
  const auto traj = solve_limit(u0, kernels::RieszParams(3, 0.5), cfg);
  CHECK(traj.times.size() == 4);  // 0, 0.02, 0.04, 0.05
  CHECK(density_at(traj, 0.02).values == traj.fields[1].values);
  const auto mid = density_at(traj, 0.03, TimeBlend::linear);
  CHECK(mid[100] == doctest::Approx(0.5 * (traj.fields[1][100] + traj.fields[2][100])));
  CHECK(drift_at(traj, 0.029, TimeBlend::nearest).comp[0] == traj.drift_fields[1].comp[0]);
  CHECK_THROWS_AS(density_at(traj, 0.06), DomainError);

  const auto dir = std::filesystem::temp_directory_path() / "rmf_test_traj";
  std::filesystem::remove_all(dir);
  write_trajectory(traj, dir, "abc");
  const auto back = read_trajectory(dir);
  CHECK(back.times == traj.times);
  CHECK(back.kernel_name == traj.kernel_name);
  CHECK(back.fields.back().values == traj.fields.back().values);
  CHECK(back.drift_fields[2].comp[1] == traj.drift_fields[2].comp[1]);
  std::filesystem::remove_all(dir);
}
