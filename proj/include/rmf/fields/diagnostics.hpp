#pragma once

#include "rmf/core/vec3.hpp"
#include "rmf/fields/grid.hpp"
#include "rmf/fields/spectral.hpp"
#include "rmf/kernels/riesz.hpp"

namespace rmf::fields {

// Grid quadrature h^3 sum f (the trapezoid rule on the torus).
double quadrature(const GridField& f);
double inner(const GridField& a, const GridField& b);
// (h^3 sum |f|^p)^(1/p); p = infinity gives max |f|.
double lp_norm(const GridField& f, double p);
// h^3 sum |grad f|^2 with the spectral gradient.
double grad_norm_sq(const Spectral& sp, const GridField& f);

double field_min(const GridField& f);
double field_max(const GridField& f);
// Largest |f| on the outermost node shell, |x|_inf >= L/2 - h.
double boundary_shell_max(const GridField& f);

// Trilinear interpolation on the periodic grid; exact at nodes.
double sample_trilinear(const GridField& f, const Vec3& x);
Vec3 sample_trilinear(const VectorField& f, const Vec3& x);
// Tensor-product degree-5 Lagrange interpolation (6 nodes per axis); exact
// at nodes and for polynomials of degree <= 5 per axis.
double sample_lagrange6(const GridField& f, const Vec3& x);

// C(p*) = 4 sigma / (p* C') with C' = |lambda (lambda + 2 - d)| C_HLS S^2:
// C_HLS the Lieb-Loss bound for the Hardy-Littlewood-Sobolev inequality
// with exponents (d/(d-2), p*) and kernel |x|^{-(lambda+2)}, S the sharp
// Sobolev constant of ||g||_{2d/(d-2)} <= S ||grad g||_2. Not sharp; used
// as a diagnostic only.
double smallness_threshold(const kernels::RieszParams& params, double sigma);

}  // namespace rmf::fields
