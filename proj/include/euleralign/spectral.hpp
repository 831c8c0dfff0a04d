#pragma once

#include "euleralign/grid.hpp"

namespace euleralign {

// C(alpha) = int_R (1 - cos z) / |z|^{1+alpha} dz via the closed form
// pi / (Gamma(1+alpha) * sin(pi*alpha/2)). The kernel-integral definition is
// the ground truth; the spectral symbol is C(alpha) * |k|^alpha so that the
// multiplier and the quadrature of the kernel agree exactly.
double frac_constant(double alpha);

// Spectral multiplication by C(alpha) * |k|^alpha; annihilates the mean.
RealField fractional_laplacian(const TorusGrid& grid, const RealField& f, double alpha);

// Spectral differentiation (ik)^order for order 1, 2, or 3. The Nyquist mode
// is zeroed for odd orders.
RealField derivative(const TorusGrid& grid, const RealField& f, int order);

// Pointwise product followed by the 2/3-rule: coefficients with 3|k| > n are
// zeroed.
RealField dealias_product(const TorusGrid& grid, const RealField& f, const RealField& g);

// Commutator forcing u * L(rho) - L(rho * u) with L the fractional Laplacian
// and both products dealiased. rho must be strictly positive.
RealField commutator_force(const TorusGrid& grid, const RealField& rho, const RealField& u,
                           double alpha);

} // namespace euleralign
