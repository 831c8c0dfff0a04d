#include "euleralign/diagnostics.hpp"

#include "euleralign/hydro.hpp"
#include "euleralign/quadrature.hpp"
#include "euleralign/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace euleralign {

DiagnosticsRecord record(const HydroState& state, double alpha) {
  validate_state(state);
  const TorusGrid& g = state.grid;
  const RealField e = e_quantity(state, alpha);
  const RealField ux = derivative(g, state.u, 1);
  const RealField uxx = derivative(g, state.u, 2);
  const RealField rhox = derivative(g, state.rho, 1);
  const RealField er = e / state.rho;
  const RealField q = derivative(g, er, 1) / state.rho;

  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.mass = g.dx * state.rho.sum();
  rec.momentum = g.dx * (state.rho * state.u).sum();
  rec.e_mass = g.dx * e.sum();
  rec.v_amplitude = state.u.maxCoeff() - state.u.minCoeff();
  rec.sup_ux = ux.abs().maxCoeff();
  rec.sup_uxx = uxx.abs().maxCoeff();
  rec.sup_rhox = rhox.abs().maxCoeff();
  rec.rho_min = state.rho.minCoeff();
  rec.rho_max = state.rho.maxCoeff();
  rec.er_min = er.minCoeff();
  rec.er_max = er.maxCoeff();
  rec.q_min = q.minCoeff();
  rec.q_max = q.maxCoeff();
  rec.flock_residual = 0.0;
  return rec;
}

double mean_velocity(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  if (records.front().mass == 0.0) throw std::invalid_argument("zero initial mass");
  return records.front().momentum / records.front().mass;
}

RealField moving_frame_density(const HydroState& state, double ubar) {
  if (state.rho.size() != state.grid.n)
    throw std::invalid_argument("state fields do not share the grid");
  const TorusGrid& g = state.grid;
  const double shift = state.t * ubar;
  SpectralField coeffs = to_spectral(g, state.rho);
  for (int m = 0; m < g.n; ++m) {
    const int k = g.wavenumbers(m);
    if (k == g.n / 2)
      coeffs(m) *= std::cos(k * shift);
    else
      coeffs(m) *= std::polar(1.0, k * shift);
  }
  return to_real(g, coeffs);
}

double flock_residual(const RealField& early, const RealField& late) {
  if (early.size() != late.size())
    throw std::invalid_argument("fields do not share the grid");
  return (early - late).abs().maxCoeff();
}

DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        double window_start, double window_end) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, value] : series) {
    if (t < window_start - 1e-12 || t > window_end + 1e-12) continue;
    if (value < 1e-14) break;
    pts.emplace_back(t, std::log(value));
  }
  if (pts.size() < 4)
    throw std::invalid_argument("fewer than 4 points in window");

  const double n = double(pts.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (const auto& [t, y] : pts) {
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw std::invalid_argument("degenerate time values in window");
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (const auto& [t, y] : pts) {
    const double r = y - (intercept + slope * t);
    ss_res += r * r;
    ss_tot += (y - ybar) * (y - ybar);
  }

  DecayFit fit;
  fit.rate = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  fit.window_start = window_start;
  fit.window_end = window_end;
  fit.points = int(pts.size());
  return fit;
}

double max_principle_ratio(const HydroState& state, double alpha) {
  validate_state(state);
  const RealField ux = derivative(state.grid, state.u, 1);
  int argmax = 0;
  double sup = 0.0;
  for (int j = 0; j < state.grid.n; ++j) {
    if (std::abs(ux(j)) > sup) {
      sup = std::abs(ux(j));
      argmax = j;
    }
  }
  const double v = state.u.maxCoeff() - state.u.minCoeff();
  if (!(v > 0.0) || !(sup > 0.0))
    throw std::invalid_argument("constant velocity is degenerate for the ratio");
  const double d = dissipation_functional(state.grid, ux, alpha, argmax);
  return d * std::pow(v, alpha) / std::pow(sup, 2.0 + alpha);
}

} // namespace euleralign
