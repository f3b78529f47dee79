#include "rmf/statistics/error_functionals.hpp"

#include <algorithm>
#include <cmath>

#include "rmf/core/errors.hpp"
#include "rmf/fields/diagnostics.hpp"

namespace rmf::statistics {

namespace {

inline double min_image(double d, double L) {
  if (d >= 0.5 * L) return d - L;
  if (d < -0.5 * L) return d + L;
  return d;
}

void check_eta(const particles::PairKernel& pk, double eta) {
  if (std::abs(pk.eta() - eta) > 1e-12 * eta) throw DomainError("error functional: kernel eta does not match N^-beta");
}

}  // namespace

MeanFieldContext::MeanFieldContext(const fields::GridField& ubar, const fields::Spectral& sp,
                                   const fields::GridKernel& K, const particles::PairKernel& pk)
    : pk_(&pk),
      Vu_(fields::convolve(sp, K, ubar)),
      LVu_(fields::convolve_laplacian(sp, K, ubar)),
      GVu_{fields::GridField(ubar.box), fields::GridField(ubar.box), fields::GridField(ubar.box)} {
  const auto g = fields::convolve_gradient(sp, K, ubar);
  for (int c = 0; c < 3; ++c) {
    GVu_[c].values = g.comp[c];
    GVu_[c].time = ubar.time;
  }
  Vu_.time = LVu_.time = ubar.time;
  uVu_ = fields::inner(ubar, Vu_);
  uLVu_ = fields::inner(ubar, LVu_);
}

double MeanFieldContext::V_conv(const Vec3& x) const { return fields::sample_lagrange6(Vu_, x); }
double MeanFieldContext::lapV_conv(const Vec3& x) const { return fields::sample_lagrange6(LVu_, x); }
Vec3 MeanFieldContext::gradV_conv(const Vec3& x) const {
  return {fields::sample_lagrange6(GVu_[0], x), fields::sample_lagrange6(GVu_[1], x),
          fields::sample_lagrange6(GVu_[2], x)};
}

PairSums pair_sums(const particles::ParticleArray& X, const particles::PairKernel& pk, double L) {
  const std::size_t N = X.size();
  std::vector<double> pv(N), pl(N);
  const double* px = X.x.data();
  const double* py = X.y.data();
  const double* pz = X.z.data();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < N; ++i) {
    double sv = 0.0, sl = 0.0;
    for (std::size_t j = i + 1; j < N; ++j) {
      const double dx = min_image(px[i] - px[j], L);
      const double dy = min_image(py[i] - py[j], L);
      const double dz = min_image(pz[i] - pz[j], L);
      const double s = dx * dx + dy * dy + dz * dz;
      sv += pk.V(s);
      sl += pk.lap(s);
    }
    pv[i] = sv;
    pl[i] = sl;
  }
  double sv = 0.0, sl = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sv += pv[i];
    sl += pl[i];
  }
  const double n = static_cast<double>(N);
  PairSums out;
  out.V = (2.0 * sv + n * pk.value_at_zero()) / (n * n);
  out.lapV = (2.0 * sl + n * pk.lap_at_zero()) / (n * n);
  return out;
}

L2H1 error_functionals(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta) {
  check_eta(ctx.pair_kernel(), eta);
  const std::size_t N = X.size();
  if (N == 0) throw DomainError("error functional: empty ensemble");
  const PairSums ps = pair_sums(X, ctx.pair_kernel(), ctx.L());
  std::vector<double> cv(N), cl(N);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) {
    cv[i] = ctx.V_conv(X[i]);
    cl[i] = ctx.lapV_conv(X[i]);
  }
  double sv = 0.0, sl = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sv += cv[i];
    sl += cl[i];
  }
  const double n = static_cast<double>(N);
  L2H1 e;
  e.l2 = ps.V - 2.0 * sv / n + ctx.self_V();
  e.h1 = -(ps.lapV - 2.0 * sl / n + ctx.self_lapV());
  return e;
}

double l2_error_sq(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta) {
  return error_functionals(X, ctx, eta).l2;
}

double h1_error_sq(const particles::ParticleArray& X, const MeanFieldContext& ctx, double eta) {
  return error_functionals(X, ctx, eta).h1;
}

void ErrorSample::append(double t, const L2H1& e) {
  if (e.l2 < -1e-12 || e.h1 < -1e-12) ++negative_flags;
  if (!times.empty()) h1_integral += 0.5 * (t - times.back()) * (h1_err_sq.back() + e.h1);
  times.push_back(t);
  l2_err_sq.push_back(e.l2);
  h1_err_sq.push_back(e.h1);
  sup_l2 = std::max(sup_l2, e.l2);
}

LlnResult lln_exceedance(const particles::ParticleArray& Xbar, const MeanFieldContext& ctx, double theta) {
  const std::size_t N = Xbar.size();
  if (N == 0) throw DomainError("lln_exceedance: empty ensemble");
  const auto& pk = ctx.pair_kernel();
  const double L = ctx.L();
  const double n = static_cast<double>(N);
  std::vector<double> db(N), da(N);
  const double* px = Xbar.x.data();
  const double* py = Xbar.y.data();
  const double* pz = Xbar.z.data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < N; ++i) {
    double bx = 0.0, by = 0.0, bz = 0.0, a = pk.value_at_zero();
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const double dx = min_image(px[i] - px[j], L);
      const double dy = min_image(py[i] - py[j], L);
      const double dz = min_image(pz[i] - pz[j], L);
      const double s = dx * dx + dy * dy + dz * dz;
      const double g = pk.g(s);
      bx += g * dx;
      by += g * dy;
      bz += g * dz;
      a += pk.V(s);
    }
    const Vec3 mean_b = Vec3{bx, by, bz} * (1.0 / n);
    db[i] = norm(mean_b - ctx.gradV_conv(Xbar[i]));
    da[i] = std::abs(a / n - ctx.V_conv(Xbar[i]));
  }
  LlnResult r;
  r.b_deviation = *std::max_element(db.begin(), db.end());
  r.a_deviation = *std::max_element(da.begin(), da.end());
  const double thr = std::pow(n, -theta);
  r.b_exceeded = r.b_deviation > thr;
  r.a_exceeded = r.a_deviation > thr;
  return r;
}

}  // namespace rmf::statistics
