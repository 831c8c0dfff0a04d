#pragma once

#include "euleralign/grid.hpp"

namespace euleralign {

// Composite Gauss-Legendre rule on (0, pi] whose cell endpoints are graded
// toward the origin: t_i = pi * (i/M)^grading. Four points per cell.
struct QuadratureRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
  double grading = 3.0;
  int count = 0;
};

// count must be a positive multiple of 4; grading >= 2.
QuadratureRule make_graded_rule(int count = 2048, double grading = 3.0);

const QuadratureRule& default_rule();

// Sum over images |k| <= k_images of |z + 2*pi*k|^{-(1+alpha)} plus a
// midpoint-rule tail for both truncated ends. z must lie in (0, pi].
double periodized_kernel(double z, double alpha, int k_images = 1024);

// Direct quadrature of the defining integral 2 * int_0^inf (1-cos z) z^{-1-alpha} dz,
// independent of the closed form used by frac_constant.
double frac_constant_by_quadrature(double alpha);

// Singular-kernel operators evaluated by graded quadrature against the
// periodized kernel, with off-grid field values obtained by direct Fourier
// summation. These are the slow reference implementations the spectral
// module is tested against.
double quad_fractional_laplacian(const TorusGrid& grid, const RealField& f, double alpha,
                                 int x_index, const QuadratureRule& rule = default_rule(),
                                 int k_images = 1024);

double quad_commutator(const TorusGrid& grid, const RealField& rho, const RealField& u,
                       double alpha, int x_index, const QuadratureRule& rule = default_rule(),
                       int k_images = 1024);

// D_alpha f(x) = int |f(x) - f(x+z)|^2 |z|^{-1-alpha} dz, always >= 0.
double dissipation_functional(const TorusGrid& grid, const RealField& f, double alpha,
                              int x_index, const QuadratureRule& rule = default_rule(),
                              int k_images = 1024);

// Node-by-node evaluation over the whole grid.
RealField quad_fractional_laplacian_field(const TorusGrid& grid, const RealField& f, double alpha,
                                          const QuadratureRule& rule = default_rule(),
                                          int k_images = 1024);

RealField quad_commutator_field(const TorusGrid& grid, const RealField& rho, const RealField& u,
                                double alpha, const QuadratureRule& rule = default_rule(),
                                int k_images = 1024);

} // namespace euleralign
