#pragma once

#include "euleralign/grid.hpp"

#include <utility>
#include <vector>

namespace euleralign {

struct HydroState;

// Scalar observables of one state: conserved integrals, transported-ratio
// extrema, sup norms, and the moving-frame Cauchy gap (filled in by the run
// loop, zero for a record taken in isolation).
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double e_mass = 0.0;
  double v_amplitude = 0.0;
  double sup_ux = 0.0;
  double sup_uxx = 0.0;
  double sup_rhox = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double er_min = 0.0;
  double er_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  double flock_residual = 0.0;
};

struct DecayFit {
  double rate = 0.0;      // value ~ prefactor * exp(-rate * t)
  double prefactor = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  int points = 0;
};

DiagnosticsRecord record(const HydroState& state, double alpha);

// P(0) / M(0) from the first record.
double mean_velocity(const std::vector<DiagnosticsRecord>& records);

// Density resampled at x + t * ubar by a spectral phase shift (exact for
// band-limited fields; the Nyquist mode shifts as a cosine).
RealField moving_frame_density(const HydroState& state, double ubar);

// Sup-norm gap between two moving-frame densities.
double flock_residual(const RealField& early, const RealField& late);

// Least-squares line on (t, log value) inside the window. A value below
// 1e-14 truncates the window at that point; at least 4 points must remain.
DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                        double window_start, double window_end);

// D_alpha u'(x+) * V^alpha / |u'(x+)|^{2+alpha} at the grid argmax x+ of
// |u'|, ties broken toward the smallest node index. Scale-invariant in u.
double max_principle_ratio(const HydroState& state, double alpha);

} // namespace euleralign
