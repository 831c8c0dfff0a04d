#include "euleralign/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace euleralign {

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

void check_length(const TorusGrid& grid, Eigen::Index len) {
  if (len != grid.n)
    throw std::invalid_argument("field length does not match grid");
}

} // namespace

TorusGrid make_grid(int n) {
  if (n < 16 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid size must be a power of two and at least 16");
  TorusGrid g;
  g.n = n;
  g.period = 2.0 * std::numbers::pi;
  g.dx = g.period / n;
  g.wavenumbers.resize(n);
  g.nodes.resize(n);
  for (int m = 0; m < n; ++m) {
    g.wavenumbers(m) = m <= n / 2 ? m : m - n;
    g.nodes(m) = m * g.dx;
  }
  return g;
}

SpectralField to_spectral(const TorusGrid& grid, const RealField& f) {
  check_length(grid, f.size());
  std::vector<double> in(f.data(), f.data() + f.size());
  std::vector<std::complex<double>> out;
  fft_engine().fwd(out, in);
  SpectralField c(grid.n);
  for (int m = 0; m < grid.n; ++m) c(m) = out[m] / double(grid.n);
  enforce_hermitian(c);
  return c;
}

RealField to_real(const TorusGrid& grid, const SpectralField& coeffs) {
  check_length(grid, coeffs.size());
  std::vector<std::complex<double>> in(grid.n);
  for (int m = 0; m < grid.n; ++m) in[m] = coeffs(m) * double(grid.n);
  std::vector<double> out;
  fft_engine().inv(out, in);
  return Eigen::Map<RealField>(out.data(), grid.n);
}

void enforce_hermitian(SpectralField& coeffs) {
  const int n = int(coeffs.size());
  coeffs(0) = std::complex<double>(coeffs(0).real(), 0.0);
  coeffs(n / 2) = std::complex<double>(coeffs(n / 2).real(), 0.0);
  for (int m = 1; m < n / 2; ++m) {
    const std::complex<double> avg = 0.5 * (coeffs(m) + std::conj(coeffs(n - m)));
    coeffs(m) = avg;
    coeffs(n - m) = std::conj(avg);
  }
}

double eval_spectral(const TorusGrid& grid, const SpectralField& coeffs, double x) {
  check_length(grid, coeffs.size());
  const int half = grid.n / 2;
  double value = coeffs(0).real();
  for (int k = 1; k < half; ++k) {
    const std::complex<double> e(std::cos(k * x), std::sin(k * x));
    value += 2.0 * (coeffs(k) * e).real();
  }
  value += coeffs(half).real() * std::cos(half * x);
  return value;
}

} // namespace euleralign
