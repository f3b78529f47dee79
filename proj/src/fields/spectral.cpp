#include "rmf/fields/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "rmf/core/errors.hpp"

namespace rmf::fields {

namespace {
// FFTW's planner is not thread-safe.
std::mutex planner_mutex;
}  // namespace

Box::Box(double L, std::size_t M) : L_(L), M_(M) {
  if (!(L > 0.0)) throw DomainError("Box: side length must be positive");
  if (M < 16 || (M & (M - 1)) != 0) throw DomainError("Box: M must be a power of two >= 16");
}

void require_same_box(const Box& a, const Box& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string(what) + ": fields live on different boxes");
}

Spectral::Spectral(const Box& box) : box_(box) {
  const int M = static_cast<int>(box.M());
  std::vector<double> rbuf(box.size());
  std::vector<cplx> cbuf(spectral_size());
  auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
  std::lock_guard lock(planner_mutex);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_r2c_ = fftw_plan_dft_r2c_3d(M, M, M, rbuf.data(), c, flags);
  plan_c2r_ = fftw_plan_dft_c2r_3d(M, M, M, c, rbuf.data(), flags | FFTW_DESTROY_INPUT);
  if (!plan_r2c_ || !plan_c2r_) throw NumericalError("Spectral: FFTW planning failed");
}

Spectral::~Spectral() {
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

void Spectral::forward(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Spectral::inverse(const cplx* in, double* out) const {
  std::vector<cplx> scratch(in, in + spectral_size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double s = 1.0 / static_cast<double>(box_.size());
  for (std::size_t n = 0; n < box_.size(); ++n) out[n] *= s;
}

std::vector<cplx> Spectral::forward(const std::vector<double>& in) const {
  std::vector<cplx> out(spectral_size());
  forward(in.data(), out.data());
  return out;
}

std::vector<double> Spectral::inverse(const std::vector<cplx>& in) const {
  std::vector<double> out(box_.size());
  inverse(in.data(), out.data());
  return out;
}

std::array<int, 3> Spectral::mode(std::size_t q) const {
  const std::size_t M = box_.M();
  const std::size_t Mh = M / 2 + 1;
  const std::size_t k = q % Mh;
  const std::size_t j = (q / Mh) % M;
  const std::size_t i = q / (Mh * M);
  auto wrapn = [M](std::size_t n) { return n < M / 2 ? static_cast<int>(n) : static_cast<int>(n) - static_cast<int>(M); };
  return {wrapn(i), wrapn(j), static_cast<int>(k)};
}

std::array<double, 3> Spectral::wavevector(std::size_t q) const {
  const auto n = mode(q);
  const double f = 2.0 * std::numbers::pi / box_.L();
  return {f * n[0], f * n[1], f * n[2]};
}

double Spectral::wavenumber(std::size_t q) const {
  const auto k = wavevector(q);
  return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

bool Spectral::kept_by_dealias(std::size_t q) const {
  const auto n = mode(q);
  const int cut = static_cast<int>(box_.M() / 3);
  return std::abs(n[0]) <= cut && std::abs(n[1]) <= cut && std::abs(n[2]) <= cut;
}

cplx Spectral::derivative_symbol(std::size_t q, int axis) const {
  const auto n = mode(q);
  if (std::abs(n[axis]) == static_cast<int>(box_.M() / 2)) return {0.0, 0.0};
  return {0.0, 2.0 * std::numbers::pi / box_.L() * n[axis]};
}

GridField spectral_derivative(const Spectral& sp, const GridField& f, int axis) {
  require_same_box(sp.box(), f.box, "spectral_derivative");
  auto fh = sp.forward(f.values);
  for (std::size_t q = 0; q < fh.size(); ++q) fh[q] *= sp.derivative_symbol(q, axis);
  GridField out(f.box, f.time);
  sp.inverse(fh.data(), out.values.data());
  return out;
}

VectorField spectral_gradient(const Spectral& sp, const GridField& f) {
  require_same_box(sp.box(), f.box, "spectral_gradient");
  const auto fh = sp.forward(f.values);
  VectorField out(f.box, f.time);
  std::vector<cplx> g(fh.size());
  for (int a = 0; a < 3; ++a) {
    for (std::size_t q = 0; q < fh.size(); ++q) g[q] = fh[q] * sp.derivative_symbol(q, a);
    sp.inverse(g.data(), out.comp[a].data());
  }
  return out;
}

}  // namespace rmf::fields
