#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "rmf/core/errors.hpp"
#include "rmf/kernels/kernel_io.hpp"
#include "rmf/kernels/kernel_set.hpp"
#include "rmf/kernels/radial_convolution.hpp"
#include "rmf/kernels/riesz.hpp"
#include "support/oracles.hpp"

using namespace rmf;
using namespace rmf::kernels;
using rmf::testing::psi_self_convolution;

namespace {

constexpr double kPi = std::numbers::pi;

// V^eta(r) = int chi^eta(y) |x - y|^{-lambda} dy as a plain double integral
// over (|y|, cos angle), valid for r > 2 eta.
double mollified_riesz_2d(const MollifierProfile& m, double eta, double lambda, double r) {
  using GL = boost::math::quadrature::gauss<double, 30>;
  double acc = 0.0;
  const int panels = 40;
  const double h = 2.0 * eta / panels;
  for (int p = 0; p < panels; ++p) {
    acc += GL::integrate(
        [&](double s) {
          const double chi = m.chi(s / eta) / (eta * eta * eta);
          const double ang = GL::integrate(
              [&](double mu) { return std::pow(r * r + s * s - 2.0 * r * s * mu, -0.5 * lambda); }, -1.0, 1.0);
          return chi * s * s * ang;
        },
        p * h, (p + 1) * h);
  }
  return 2.0 * kPi * acc;
}

}  // namespace

TEST_CASE("riesz_phi examples") {
  CHECK(riesz_phi(1.0, RieszParams(3, 0.5)) == doctest::Approx(1.0));
  CHECK(riesz_phi(2.0, RieszParams(3, 0.5)) == doctest::Approx(0.707107).epsilon(1e-6));
  CHECK(riesz_phi(0.25, RieszParams(3, 0.8)) == doctest::Approx(3.03143).epsilon(1e-5));
  CHECK_THROWS_AS(riesz_phi(0.0, RieszParams(3, 0.5)), DomainError);
  CHECK_THROWS_AS(riesz_phi(-1.0, RieszParams(3, 0.5)), DomainError);
}

TEST_CASE("RieszParams enforces the sub-Coulomb window") {
  CHECK_THROWS_AS(RieszParams(3, 0.0), DomainError);
  CHECK_THROWS_AS(RieszParams(3, 1.0), DomainError);
  CHECK_THROWS_AS(RieszParams(2, 0.5), DomainError);
  CHECK(RieszParams(3, 0.5).critical_exponent() == doctest::Approx(1.2));
  CHECK(RieszParams(3, 0.5).psi_exponent() == doctest::Approx(1.75));
}

TEST_CASE("Psi * Psi reproduces Phi") {
  for (double lambda : {0.5, 0.9}) {
    const RieszParams p(3, lambda);
    const double c = psi_constant(p);
    CHECK(c > 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double r = 0.05 * std::pow(400.0, i / 40.0);
      worst = std::max(worst, std::abs(psi_self_convolution(r, c, p.psi_exponent()) / riesz_phi(r, p) - 1.0));
    }
    CAPTURE(lambda);
    CHECK(worst < 1e-3);
  }
  CHECK(psi_constant(RieszParams(3, 0.5)) == doctest::Approx(0.160949378416601).epsilon(1e-12));
}

TEST_CASE("Riesz Fourier constant satisfies the reflection check") {
  // C_{a,3} Gamma(a-1) sin(pi (a-1)/2) ... reduces to 2 pi^2 at a = 1/2.
  const double C = riesz_fourier_constant(3, 0.5);
  CHECK(C * std::tgamma(-0.5) * std::sin(kPi * (-0.5) / 2.0) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));
  CHECK(riesz_symbol(0.0, RieszParams(3, 0.5)) == 0.0);
}

TEST_CASE("standard bump is a normalized density") {
  const auto m = MollifierProfile::standard_bump();
  CHECK(std::abs(m->mass() - 1.0) < 1e-10);
  CHECK(std::abs(m->chi_mass() - 1.0) < 1e-10);
  CHECK(m->fourier(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((*m)(1.0) == 0.0);
  CHECK(m->chi(2.0) == 0.0);
  for (int i = 0; i < 100; ++i) CHECK((*m)(i / 100.0) >= 0.0);
  CHECK(m->fourier_tail_bound() < 1e-8);
}

TEST_CASE("PowerConvolution matches its closed form for a uniform ball") {
  // f = 1 on the unit ball, p = 1 would be Newtonian; take p = 0.5 and
  // check the value at 0 and far-field mass asymptotics.
  PowerConvolution pc{[](double) { return 1.0; }, 1.0, 0.5};
  CHECK(pc.value_at_zero() == doctest::Approx(4.0 * kPi / 2.5).epsilon(1e-10));
  const double mass = 4.0 * kPi / 3.0;
  CHECK(pc.value(1e4) == doctest::Approx(mass * std::pow(1e4, -0.5)).epsilon(1e-6));
  CHECK(pc.value(1e-8) == doctest::Approx(pc.value_at_zero()).epsilon(1e-8));
}

TEST_CASE("kernel set structural properties") {
  const RieszParams p(3, 0.5);
  const double eta = 0.2;
  const auto ks = build_kernel_set(p, eta);
  const auto m = MollifierProfile::standard_bump();

  SUBCASE("gradient vanishes at the origin and is antisymmetric") {
    const Vec3 g0 = eval_gradV(ks, Vec3{0, 0, 0});
    CHECK(g0.x == 0.0);
    CHECK(g0.y == 0.0);
    CHECK(g0.z == 0.0);
    CHECK(ks.dV().value_at_zero() == 0.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 x{nd(rng), nd(rng), nd(rng)};
      const Vec3 a = eval_gradV(ks, x);
      const Vec3 b = eval_gradV(ks, -x);
      REQUIRE(a.x == -b.x);
      REQUIRE(a.y == -b.y);
      REQUIRE(a.z == -b.z);
    }
  }

  SUBCASE("symbol is a convolution square and nonnegative") {
    for (int i = 0; i <= 2000; ++i) {
      const double k = 1e-4 * std::pow(1e8, i / 2000.0);
      const double sv = ks.symbol_V(k);
      const double sz = ks.symbol_Z(k);
      REQUIRE(sv >= 0.0);
      REQUIRE(std::abs(sv - sz * sz) <= 1e-14 * std::max(1.0, sv));
    }
    CHECK(ks.symbol_V(0.0) == 0.0);
  }

  SUBCASE("V positive on every node") {
    CHECK(ks.V().value_at_zero() > 0.0);
    for (double v : ks.V().values()) REQUIRE(v > 0.0);
  }

  SUBCASE("far field against a 2-D quadrature oracle") {
    const double r = 20.0 * eta;
    const double oracle = mollified_riesz_2d(*m, eta, p.lambda(), r);
    CHECK(eval_V(ks, r) == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(std::abs(eval_V(ks, r) / riesz_phi(r, p) - 1.0) < 1e-2);
    const double r2 = 3.0 * eta;
    CHECK(eval_V(ks, r2) == doctest::Approx(mollified_riesz_2d(*m, eta, p.lambda(), r2)).epsilon(1e-8));
  }

  SUBCASE("tail model") {
    const double r = 1e3 * ks.V().r_max();
    CHECK(eval_V(ks, r) == doctest::Approx(riesz_phi(r, p)).epsilon(1e-6));
    CHECK(ks.V().tail_coefficient() == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("finite differences of V reproduce dV and lapV") {
    double worst_d = 0.0, worst_l = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = 0.05 * eta * std::pow(400.0, i / 200.0);
      const double h = 1e-3 * r;
      const double vp = eval_V(ks, r + h), v = eval_V(ks, r), vm = eval_V(ks, r - h);
      const double fd1 = (vp - vm) / (2 * h);
      const double fd2 = (vp - 2 * v + vm) / (h * h) + 2.0 * fd1 / r;
      worst_d = std::max(worst_d, std::abs(fd1 / ks.dV()(r) - 1.0));
      worst_l = std::max(worst_l, std::abs(fd2 - eval_lapV(ks, r)) / std::abs(ks.lapV().value_at_zero()));
    }
    CHECK(worst_d < 1e-4);
    CHECK(worst_l < 1e-4);
  }

  SUBCASE("||Z||^2 equals V(0)") {
    const double z = z_l2_norm(ks);
    CHECK(z * z == doctest::Approx(ks.V().value_at_zero()).epsilon(1e-5));
  }

  SUBCASE("Fourier route agrees") {
    for (double r : {0.0 + 1e-3, 0.1, 0.5, 2.0, 10.0}) {
      CHECK(fourier_route_V(p, eta, *m, r) == doctest::Approx(eval_V(ks, r)).epsilon(1e-8));
    }
  }
}

TEST_CASE("radial table interpolates nodes and continues the tail") {
  const auto ks = build_kernel_set(RieszParams(3, 0.9), 0.1);
  const auto& t = ks.V();
  for (std::size_t i = 0; i < t.size(); i += 97) {
    CHECK(t(t.node(i)) == doctest::Approx(t.values()[i]).epsilon(1e-13));
  }
  CHECK(t(t.r_max() * (1.0 + 1e-12)) == doctest::Approx(t.values().back()).epsilon(1e-6));
  CHECK(t(t.r_max() * (1.0 - 1e-12)) == doctest::Approx(t.values().back()).epsilon(1e-6));
  CHECK(t(0.0) == t.value_at_zero());
  CHECK(t.r_max() >= 100.0 * ks.eta());
}

TEST_CASE("mollification converges to Phi monotonically") {
  const RieszParams p(3, 0.5);
  const auto k1 = build_kernel_set(p, 0.1);
  const auto k2 = build_kernel_set(p, 0.2);
  for (int i = 0; i <= 50; ++i) {
    const double r = 0.8 * std::pow(25.0, i / 50.0);
    const double e1 = std::abs(eval_V(k1, r) - riesz_phi(r, p));
    const double e2 = std::abs(eval_V(k2, r) - riesz_phi(r, p));
    CAPTURE(r);
    CHECK(e1 < e2);
  }
  double prev = 1e300;
  for (double eta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const double err = std::abs(eval_V(build_kernel_set(p, eta), 1.0) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("scaling slopes and dense-grid sup oracle") {
  const RieszParams p(3, 0.5);
  const double beta = 0.05;
  const std::vector<double> N{1024.0, 8192.0, 65536.0, 262144.0};
  for (auto q : {ScalingQuantity::V, ScalingQuantity::gradV, ScalingQuantity::hessV, ScalingQuantity::Z_L2}) {
    const auto rep = verify_scaling_bounds(p, beta, N, q);
    CAPTURE(static_cast<int>(q));
    CHECK(std::abs(rep.slope / rep.predicted_slope - 1.0) < 0.1);
  }
  // Sup of |V'| from a dense direct-quadrature search on [0, 4 eta].
  const auto rep = verify_scaling_bounds(p, beta, N, ScalingQuantity::gradV);
  const auto m = MollifierProfile::standard_bump();
  for (std::size_t j = 0; j < N.size(); j += 3) {
    const double eta = rep.eta[j];
    PowerConvolution pc{[&](double s) { return m->chi(s / eta) / (eta * eta * eta); }, 2.0 * eta, p.lambda()};
    double sup = 0.0;
    for (int i = 1; i <= 800; ++i) sup = std::max(sup, std::abs(pc.derivative(4.0 * eta * i / 800.0)));
    CHECK(rep.norm[j] == doctest::Approx(sup).epsilon(1e-4));
  }
}

TEST_CASE("kernel table round trip") {
  const auto ks = build_kernel_set(RieszParams(3, 0.5), 0.3);
  const auto dir = std::filesystem::temp_directory_path() / "rmf_test_kernel_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "k.tbl";
  export_kernel_set(ks, path);
  const auto back = import_kernel_set(path);
  CHECK(kernel_set_hash(back) == kernel_set_hash(ks));
  CHECK(back.eta() == ks.eta());
  CHECK(back.params() == ks.params());
  for (double r : {0.0, 1e-5, 0.01, 0.3, 1.0, 7.5, 80.0, 1e4}) {
    CHECK(eval_V(back, r) == eval_V(ks, r));
    CHECK(back.dV()(r) == ks.dV()(r));
    CHECK(eval_lapV(back, r) == eval_lapV(ks, r));
    CHECK(eval_Z(back, r) == eval_Z(ks, r));
  }

  // Flip one payload byte.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(-100, std::ios::end);
    char c = 0;
    f.read(&c, 1);
    c ^= 0x5a;
    f.seekp(-100, std::ios::end);
    f.write(&c, 1);
  }
  CHECK_THROWS_AS(import_kernel_set(path), NumericalError);

  std::ofstream(dir / "bad.tbl") << "not a table\n";
  CHECK_THROWS_AS(import_kernel_set(dir / "bad.tbl"), DomainError);
  std::filesystem::remove_all(dir);
}
