#include "rmf/fields/grid_kernel.hpp"

#include <cmath>

#include "rmf/core/errors.hpp"

namespace rmf::fields {

GridKernel GridKernel::from_symbol(const Spectral& sp, const std::function<double(double)>& symbol, std::string name) {
  GridKernel K(sp.box(), std::move(name));
  const std::size_t n = sp.spectral_size();
  K.value_.resize(n);
  K.lap_.resize(n);
  for (auto& g : K.grad_) g.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double k = sp.wavenumber(q);
    const double s = k == 0.0 ? 0.0 : symbol(k);
    K.value_[q] = s;
    K.lap_[q] = -k * k * s;
    for (int a = 0; a < 3; ++a) K.grad_[a][q] = sp.derivative_symbol(q, a) * s;
  }
  return K;
}

GridKernel GridKernel::intermediate(const Spectral& sp, const kernels::RadialKernelSet& ks) {
  return from_symbol(sp, [&ks](double k) { return ks.symbol_V(k); }, "intermediate");
}

GridKernel GridKernel::riesz(const Spectral& sp, const kernels::RieszParams& params) {
  return from_symbol(sp, [params](double k) { return kernels::riesz_symbol(k, params); }, "riesz");
}

GridKernel GridKernel::truncated(const Spectral& sp, const kernels::RadialKernelSet& ks) {
  const Box& b = sp.box();
  GridKernel K(b, "truncated");
  const std::size_t M = b.M();
  const double h = b.h();
  const double w = b.cell_volume();
  std::vector<double> v(b.size()), lap(b.size());
  std::array<std::vector<double>, 3> g;
  for (auto& c : g) c.assign(b.size(), 0.0);

  // Offsets in index units: 0..M/2-1 positive, M/2..M-1 negative, with the
  // offset M/2 sitting at distance exactly L/2 in both directions.
  auto offset = [M](std::size_t i) { return i < M / 2 ? static_cast<double>(i) : static_cast<double>(i) - M; };
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      for (std::size_t k = 0; k < M; ++k) {
        const Vec3 x{offset(i) * h, offset(j) * h, offset(k) * h};
        const double r = norm(x);
        const std::size_t n = b.index(i, j, k);
        v[n] = w * kernels::eval_V(ks, r);
        lap[n] = w * kernels::eval_lapV(ks, r);
        const Vec3 gr = kernels::eval_gradV(ks, x);
        // grad K is odd; on the planes at offset M/2 the two images cancel.
        if (i != M / 2) g[0][n] = w * gr.x;
        if (j != M / 2) g[1][n] = w * gr.y;
        if (k != M / 2) g[2][n] = w * gr.z;
      }
    }
  }
  K.value_ = sp.forward(v);
  K.lap_ = sp.forward(lap);
  for (int a = 0; a < 3; ++a) K.grad_[a] = sp.forward(g[a]);
  return K;
}

namespace {
GridField apply(const Spectral& sp, const std::vector<cplx>& m, const std::vector<cplx>& fh, const Box& b, double t) {
  std::vector<cplx> g(fh.size());
  for (std::size_t q = 0; q < fh.size(); ++q) g[q] = fh[q] * m[q];
  GridField out(b, t);
  sp.inverse(g.data(), out.values.data());
  return out;
}
}  // namespace

GridField convolve(const Spectral& sp, const GridKernel& K, const GridField& f) {
  require_same_box(K.box(), f.box, "convolve");
  return apply(sp, K.value_multiplier(), sp.forward(f.values), f.box, f.time);
}

VectorField convolve_gradient(const Spectral& sp, const GridKernel& K, const GridField& f) {
  require_same_box(K.box(), f.box, "convolve_gradient");
  const auto fh = sp.forward(f.values);
  VectorField out(f.box, f.time);
  for (int a = 0; a < 3; ++a) out.comp[a] = apply(sp, K.grad_multiplier(a), fh, f.box, f.time).values;
  return out;
}

GridField convolve_laplacian(const Spectral& sp, const GridKernel& K, const GridField& f) {
  require_same_box(K.box(), f.box, "convolve_laplacian");
  return apply(sp, K.lap_multiplier(), sp.forward(f.values), f.box, f.time);
}

}  // namespace rmf::fields
