#include "euleralign/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace euleralign {

namespace {

constexpr double pi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
}

void check_same_grid(const TorusGrid& grid, const RealField& f, const RealField& g) {
  if (f.size() != grid.n || g.size() != grid.n)
    throw std::invalid_argument("fields do not share the grid");
}

} // namespace

double frac_constant(double alpha) {
  check_alpha(alpha);
  return pi / (std::tgamma(1.0 + alpha) * std::sin(0.5 * pi * alpha));
}

RealField fractional_laplacian(const TorusGrid& grid, const RealField& f, double alpha) {
  check_alpha(alpha);
  const double c = frac_constant(alpha);
  SpectralField coeffs = to_spectral(grid, f);
  coeffs(0) = 0.0;
  for (int m = 1; m < grid.n; ++m) {
    const double k = std::abs(grid.wavenumbers(m));
    coeffs(m) *= c * std::pow(k, alpha);
  }
  return to_real(grid, coeffs);
}

RealField derivative(const TorusGrid& grid, const RealField& f, int order) {
  if (order < 1 || order > 3)
    throw std::invalid_argument("derivative order must be 1, 2, or 3");
  SpectralField coeffs = to_spectral(grid, f);
  for (int m = 0; m < grid.n; ++m) {
    const double k = grid.wavenumbers(m);
    switch (order) {
      case 1: coeffs(m) *= std::complex<double>(0.0, k); break;
      case 2: coeffs(m) *= -k * k; break;
      case 3: coeffs(m) *= std::complex<double>(0.0, -k * k * k); break;
    }
  }
  if (order % 2 == 1) coeffs(grid.n / 2) = 0.0;
  enforce_hermitian(coeffs);
  return to_real(grid, coeffs);
}

RealField dealias_product(const TorusGrid& grid, const RealField& f, const RealField& g) {
  check_same_grid(grid, f, g);
  SpectralField coeffs = to_spectral(grid, f * g);
  for (int m = 0; m < grid.n; ++m) {
    if (3 * std::abs(grid.wavenumbers(m)) > grid.n) coeffs(m) = 0.0;
  }
  return to_real(grid, coeffs);
}

RealField commutator_force(const TorusGrid& grid, const RealField& rho, const RealField& u,
                           double alpha) {
  check_alpha(alpha);
  check_same_grid(grid, rho, u);
  if (!(rho.minCoeff() > 0.0))
    throw std::invalid_argument("density must be strictly positive");
  return dealias_product(grid, u, fractional_laplacian(grid, rho, alpha)) -
         fractional_laplacian(grid, dealias_product(grid, rho, u), alpha);
}

} // namespace euleralign
