#pragma once

#include <Eigen/Dense>

namespace euleralign {

// Real samples at grid nodes, and normalized Fourier coefficients
// (coeff k = raw DFT / n) in FFT index order: index m holds wavenumber
// m for m <= n/2 and m - n above.
using RealField = Eigen::ArrayXd;
using SpectralField = Eigen::ArrayXcd;

struct TorusGrid {
  int n = 0;
  double period = 0.0;
  double dx = 0.0;
  Eigen::ArrayXi wavenumbers;
  Eigen::ArrayXd nodes;
};

// n must be a power of two, at least 16. Nodes are x_j = 2*pi*j/n.
TorusGrid make_grid(int n);

SpectralField to_spectral(const TorusGrid& grid, const RealField& f);
RealField to_real(const TorusGrid& grid, const SpectralField& coeffs);

// Averages coeff(k) with conj(coeff(-k)) in place; makes modes 0 and n/2 real.
void enforce_hermitian(SpectralField& coeffs);

// Band-limited interpolant at an arbitrary point. The Nyquist mode is
// treated as a pure cosine so the value is real and matches the samples.
double eval_spectral(const TorusGrid& grid, const SpectralField& coeffs, double x);

} // namespace euleralign
