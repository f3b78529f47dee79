#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "rmf/core/counter_rng.hpp"
#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"
#include "rmf/fields/solvers.hpp"
#include "rmf/statistics/csv.hpp"
#include "rmf/statistics/error_functionals.hpp"
#include "rmf/statistics/estimators.hpp"
#include "rmf/statistics/fluctuations.hpp"

using namespace rmf;
using namespace rmf::statistics;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t realization, double mean = 0.0, double sd = 1.0) {
  const CounterRng rng(99, realization);
  std::vector<double> x;
  for (std::uint32_t i = 0; x.size() < n; ++i) {
    const Vec3 g = rng.normal3(Stream::synthetic, i, 0);
    for (double v : {g.x, g.y, g.z})
      if (x.size() < n) x.push_back(mean + sd * v);
  }
  return x;
}

struct Setup {
  explicit Setup(double eta_, std::size_t M = 64)
      : eta(eta_),
        box(16.0, M),
        sp(box),
        ks(kernels::build_kernel_set(kernels::RieszParams(3, 0.5), eta)),
        pk(ks, 192.0),
        K(fields::GridKernel::truncated(sp, ks)),
        u0(fields::InitialDensity::gaussian(1.0).render(box)),
        ctx(u0, sp, K, pk) {}

  particles::ParticleArray sample(std::size_t N, std::uint64_t realization) const {
    particles::EnsembleConfig cfg;
    cfg.N = N;
    cfg.seed = 5;
    cfg.realization = realization;
    return particles::init_ensemble(cfg, fields::InitialDensity::gaussian(1.0)).X;
  }

  double eta;
  fields::Box box;
  fields::Spectral sp;
  kernels::RadialKernelSet ks;
  particles::PairKernel pk;
  fields::GridKernel K;
  fields::GridField u0;
  MeanFieldContext ctx;
};

const Setup& setup() {
  static const Setup s(0.7);
  return s;
}

// h^3 sum_y F(minimum image(x - y)) u(y)
template <class F>
auto direct_conv(const fields::GridField& u, const Vec3& x, F f) {
  const auto& b = u.box;
  decltype(f(Vec3{}, 0.0)) acc{};
  for (std::size_t i = 0; i < b.M(); ++i)
    for (std::size_t j = 0; j < b.M(); ++j)
      for (std::size_t k = 0; k < b.M(); ++k) {
        const double w = u[b.index(i, j, k)];
        if (w == 0.0) continue;
        acc += w * f(minimum_image(x, b.node(i, j, k), b.L()), b.L());
      }
  return b.cell_volume() * acc;
}

// <N(0, s^2 I), exp(-|x - c|^2 / (2 w^2))>
double gauss_pair(double s2, double w2, const Vec3& c) {
  return std::pow(w2 / (s2 + w2), 1.5) * std::exp(-dot(c, c) / (2.0 * (s2 + w2)));
}

}  // namespace

TEST_CASE("Kolmogorov tail and KS test") {
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_q(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_q(0.0) == 1.0);

  int rejections = 0;
  for (std::uint64_t r = 0; r < 200; ++r)
    if (ks_test_normal(normals(200, r), 0.0, 1.0).p_value < 0.05) ++rejections;
  CHECK(rejections >= 2);
  CHECK(rejections <= 20);

  CHECK(ks_test_normal(normals(200, 7, 0.5), 0.0, 1.0).p_value < 0.01);
  CHECK_THROWS_AS(ks_test_normal({1.0}, 0.0, 0.0), DomainError);
}

TEST_CASE("chi-square variance interval") {
  const Interval ci = variance_ci(1.0, 11, 0.95);
  CHECK(ci.lo == doctest::Approx(10.0 / 20.4832).epsilon(1e-4));
  CHECK(ci.hi == doctest::Approx(10.0 / 3.24697).epsilon(1e-4));
}

TEST_CASE("normality report") {
  const auto x = normals(1000, 3, 0.0, std::sqrt(2.0));
  const NormalityReport r = normality_report(x, 2.0);
  CHECK(r.n == 1000);
  CHECK(r.variance_interval.contains(2.0));
  CHECK(r.ks_p_value > 0.01);
  CHECK(r.cf_distance < 0.1);
  CHECK_THROWS_AS(normality_report(x, 0.0), DomainError);
  CHECK_THROWS_AS(normality_report(normals(50, 1), 1.0), DomainError);
}

TEST_CASE("rate fit") {
  const std::vector<double> Ns{500, 1000, 2000, 4000};
  SUBCASE("exact power law") {
    std::vector<std::vector<double>> s;
    for (double N : Ns) s.push_back(std::vector<double>(30, 3.0 * std::pow(N, -0.6)));
    const RateFit f = rate_fit(Ns, s);
    CHECK(std::abs(f.slope + 0.6) < 1e-12);
    CHECK(std::abs(f.slope_interval.lo + 0.6) < 1e-12);
    CHECK(std::abs(f.slope_interval.hi + 0.6) < 1e-12);
  }
  SUBCASE("bootstrap coverage with exponential noise") {
    std::mt19937_64 gen(1);
    std::exponential_distribution<double> noise(1.0);
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      std::vector<std::vector<double>> s;
      for (double N : Ns) {
        std::vector<double> v;
        for (int r = 0; r < 30; ++r) v.push_back(std::pow(N, -0.6) * noise(gen));
        s.push_back(v);
      }
      if (rate_fit(Ns, s, 0.95, 400, static_cast<std::uint64_t>(t)).slope_interval.contains(-0.6)) ++covered;
    }
    CHECK(covered >= static_cast<int>(0.88 * trials));
  }
  CHECK_THROWS_AS(rate_fit(Ns, {{1.0}, {-1.0}, {1.0}, {1.0}}), DomainError);
}

TEST_CASE("CSV quoting and number format") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const std::string path = "test_statistics_tmp.csv";
  {
    CsvWriter w(path, {"run_id", "realization", "t", "statistic", "value"});
    w.sample("r1", 4, 0.5, "l2,sq", 2.5);
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "run_id,realization,t,statistic,value\r\nr1,4,0.5,\"l2,sq\",2.5\r\n");
  std::remove(path.c_str());
}

TEST_CASE("mean-field context matches direct grid sums") {
  const auto& s = setup();
  for (const Vec3 x : {Vec3{0.1, 0.2, -0.3}, Vec3{2.3, -1.1, 0.7}, Vec3{7.0, 7.0, -6.5}}) {
    const double v = direct_conv(s.u0, x, [&](const Vec3& d, double) { return kernels::eval_V(s.ks, norm(d)); });
    const double l = direct_conv(s.u0, x, [&](const Vec3& d, double) { return kernels::eval_lapV(s.ks, norm(d)); });
    // The truncated kernel zeroes grad V on the planes d_c = -L/2.
    const Vec3 g = direct_conv(s.u0, x, [&](const Vec3& d, double L) {
      Vec3 gv = kernels::eval_gradV(s.ks, d);
      if (d.x == -0.5 * L) gv.x = 0.0;
      if (d.y == -0.5 * L) gv.y = 0.0;
      if (d.z == -0.5 * L) gv.z = 0.0;
      return gv;
    });
    CHECK(s.ctx.V_conv(x) == doctest::Approx(v).epsilon(1e-6));
    CHECK(s.ctx.lapV_conv(x) == doctest::Approx(l).epsilon(1e-5));
    CHECK(norm(s.ctx.gradV_conv(x) - g) < 1e-4 * norm(g));
  }
}

TEST_CASE("pairwise error functionals") {
  const auto& s = setup();

  SUBCASE("N = 1 term by term") {
    particles::ParticleArray X(1);
    const Vec3 x{6.0, -5.0, 4.0};
    X.set(0, x);
    const double conv =
        direct_conv(s.u0, x, [&](const Vec3& d, double) { return kernels::eval_V(s.ks, norm(d)); });
    const double want = kernels::eval_V(s.ks, 0.0) - 2.0 * conv + s.ctx.self_V();
    CHECK(l2_error_sq(X, s.ctx, s.eta) == doctest::Approx(want).epsilon(1e-6));
    CHECK_THROWS_AS(l2_error_sq(X, s.ctx, 0.5), DomainError);
  }

  SUBCASE("permutation invariance and nonnegativity") {
    auto X = s.sample(400, 0);
    const L2H1 a = error_functionals(X, s.ctx, s.eta);
    std::vector<std::size_t> perm(X.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(2));
    particles::ParticleArray Y(X.size());
    for (std::size_t i = 0; i < perm.size(); ++i) Y.set(i, X[perm[i]]);
    const L2H1 b = error_functionals(Y, s.ctx, s.eta);
    CHECK(a.l2 > 0.0);
    CHECK(a.h1 > 0.0);
    CHECK(b.l2 == doctest::Approx(a.l2).epsilon(1e-12));
    CHECK(b.h1 == doctest::Approx(a.h1).epsilon(1e-12));
  }

  SUBCASE("N = 16 against grid-rendered f - g") {
    const auto X = s.sample(16, 3);
    const auto& b = s.box;
    // Z sampled at minimum-image node offsets, so Z*u is a periodic grid sum.
    fields::GridField Zs(b);
    for (std::size_t i = 0; i < b.M(); ++i)
      for (std::size_t j = 0; j < b.M(); ++j)
        for (std::size_t k = 0; k < b.M(); ++k) {
          const Vec3 d = wrap(b.node(i, j, k) + Vec3{0.5 * b.L(), 0.5 * b.L(), 0.5 * b.L()}, b.L());
          Zs[b.index(i, j, k)] = kernels::eval_Z(s.ks, norm(d));
        }
    std::vector<fields::cplx> zh(s.sp.spectral_size()), uh(s.sp.spectral_size());
    s.sp.forward(Zs.values.data(), zh.data());
    s.sp.forward(s.u0.values.data(), uh.data());
    for (std::size_t q = 0; q < uh.size(); ++q) uh[q] *= zh[q] * b.cell_volume();
    fields::GridField D(b);
    s.sp.inverse(uh.data(), D.values.data());
    const fields::GridField g = D;
    const std::size_t M = b.M();
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = 0; k < M; ++k) {
          double f = 0.0;
          for (std::size_t p = 0; p < X.size(); ++p)
            f += kernels::eval_Z(s.ks, norm(minimum_image(b.node(i, j, k), X[p], b.L())));
          D[b.index(i, j, k)] = f / 16.0 - g[b.index(i, j, k)];
        }
    const double grid_l2 = fields::inner(D, D);
    const double grid_h1 = fields::grad_norm_sq(s.sp, D);
    const L2H1 e = error_functionals(X, s.ctx, s.eta);
    MESSAGE("pairwise l2 " << e.l2 << " grid " << grid_l2 << "; pairwise h1 " << e.h1 << " grid " << grid_h1);
    CHECK(std::abs(e.l2 - grid_l2) < 1e-2 * e.l2);
    CHECK(std::abs(e.h1 - grid_h1) < 1e-2 * e.h1);
  }

  SUBCASE("t = 0 identity, small Monte Carlo") {
    const std::size_t N = 100, R = 150;
    std::vector<double> v;
    for (std::uint64_t r = 0; r < R; ++r) v.push_back(l2_error_sq(s.sample(N, r), s.ctx, s.eta));
    const Moments m = moments(v);
    const double se = std::sqrt(m.variance / R);
    const double expect = (s.pk.value_at_zero() - s.ctx.self_V()) / N;
    MESSAGE("mean " << m.mean << " expected " << expect << " se " << se);
    CHECK(std::abs(m.mean - expect) < 3.0 * se);
  }
}

TEST_CASE("error sample accumulation") {
  ErrorSample e;
  e.append(0.0, {1.0, 2.0});
  e.append(0.1, {3.0, 4.0});
  e.append(0.2, {2.0, -1.0});
  CHECK(e.sup_l2 == 3.0);
  CHECK(e.h1_integral == doctest::Approx(0.05 * 6.0 + 0.05 * 3.0));
  CHECK(e.negative_flags == 1);
  CHECK(e.rate_statistic(0.5) == doctest::Approx(3.0 + 0.5 * 0.45));
}

TEST_CASE("LLN statistic") {
  const auto& s = setup();
  particles::ParticleArray X(1);
  X.set(0, {0.8, 0.1, -0.4});
  const LlnResult r = lln_exceedance(X, s.ctx, 0.3);
  CHECK(r.b_deviation == doctest::Approx(norm(s.ctx.gradV_conv(X[0]))).epsilon(1e-14));
  CHECK(r.a_deviation == doctest::Approx(std::abs(s.pk.value_at_zero() - s.ctx.V_conv(X[0]))).epsilon(1e-14));

  // Xbar drawn from u itself: the deviation shrinks like N^{-1/2}.
  const double d1 = lln_exceedance(s.sample(250, 1), s.ctx, 0.3).b_deviation;
  const double d2 = lln_exceedance(s.sample(4000, 1), s.ctx, 0.3).b_deviation;
  MESSAGE("deviation N=250 " << d1 << " N=4000 " << d2);
  CHECK(d2 < 0.5 * d1);
  CHECK(d2 > 0.1 * d1);
}

TEST_CASE("test functions") {
  const fields::Box box(16.0, 64);
  for (const auto& phi : TestFunction::default_set()) {
    CAPTURE(phi.id());
    const Vec3 x{0.3, -0.2, 0.45};
    const double h = 1e-5;
    for (int c = 0; c < 3; ++c) {
      Vec3 e{};
      (c == 0 ? e.x : c == 1 ? e.y : e.z) = h;
      const double fd = (phi(x + e) - phi(x - e)) / (2 * h);
      CHECK(phi.gradient(x)[c] == doctest::Approx(fd).epsilon(1e-8));
    }
    CHECK(fields::boundary_shell_max(phi.render(box)) < 1e-12);
  }
}

TEST_CASE("fluctuation pairing") {
  const auto& s = setup();
  const auto X = s.sample(500, 2);
  CHECK(std::abs(fluctuation_pairing(X, s.u0, TestFunction::constant("one", 1.0))) < 1e-9);
  const auto phi = TestFunction::default_set()[0];
  const double ref = fields::inner(s.u0, phi.render(s.box));
  double sum = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) sum += phi(X[i]);
  CHECK(fluctuation_pairing(X, s.u0, phi) == doctest::Approx(std::sqrt(500.0) * (sum / 500.0 - ref)));
}

TEST_CASE("CLT target variance") {
  const auto& s = setup();
  fields::PdeConfig cfg;
  const auto traj = fields::solve_nonlocal(s.u0, s.sp, s.K, cfg);
  const auto phis = TestFunction::default_set();

  SUBCASE("t = 0 is the variance of phi under u0") {
    const auto f = phis[1].render(s.box);
    fields::GridField f2(s.box);
    for (std::size_t i = 0; i < f.values.size(); ++i) f2[i] = f[i] * f[i];
    const double m = fields::inner(s.u0, f);
    const CltVariance v = clt_target_variance(f, 0.0, traj, s.sp, s.K, cfg);
    CHECK(v.integral_term == 0.0);
    CHECK(v.total() == doctest::Approx(fields::inner(s.u0, f2) - m * m).epsilon(1e-14));
  }

  SUBCASE("a constant has zero variance") {
    const CltVariance v =
        clt_target_variance(TestFunction::constant("c", 2.0).render(s.box), 0.3, traj, s.sp, s.K, cfg);
    CHECK(std::abs(v.total()) < 1e-12);
  }

  SUBCASE("without interaction it is the variance of phi under the heat flow") {
    const double t = 0.5, s2 = 1.0 + 2.0 * cfg.sigma * t;
    const double w = 0.6;
    const Vec3 c{0.7, 0.0, 0.0};
    const double exact_gauss = gauss_pair(s2, 0.5 * w * w, c) - std::pow(gauss_pair(s2, w * w, c), 2);
    // (d.x) exp(-|x|^2/(2w^2)) with w = 1: mean 0, second moment from the
    // product Gaussian of variance s2 w'^2 / (s2 + w'^2), w'^2 = 1/2.
    const double wp2 = 0.5;
    const double exact_lin = std::pow(wp2 / (s2 + wp2), 1.5) * s2 * wp2 / (s2 + wp2);

    auto variance = [&](const TestFunction& phi, double dt) {
      fields::PdeConfig heat = cfg;
      heat.interaction = false;
      heat.dt = dt;
      const auto htraj = fields::solve_nonlocal(s.u0, s.sp, s.K, heat);
      return clt_target_variance(phi.render(s.box), t, htraj, s.sp, s.K, heat).total();
    };
    for (const auto& [phi, exact] : {std::pair{phis[1], exact_gauss}, std::pair{phis[3], exact_lin}}) {
      CAPTURE(phi.id());
      const double v1 = variance(phi, 0.01), v2 = variance(phi, 0.005);
      MESSAGE(phi.id() << ": dt=0.01 " << v1 << " dt=0.005 " << v2 << " closed form " << exact);
      // First order in dt; the extrapolated value removes the O(dt) term.
      CHECK(std::abs(v1 - exact) < 1e-3);
      CHECK((v1 - exact) / (v2 - exact) == doctest::Approx(2.0).epsilon(0.05));
      CHECK(std::abs(2.0 * v2 - v1 - exact) < 2e-4 * exact);
    }
  }
}
