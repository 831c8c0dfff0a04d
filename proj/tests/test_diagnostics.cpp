#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "euleralign/diagnostics.hpp"
#include "euleralign/hydro.hpp"
#include "euleralign/quadrature.hpp"
#include "euleralign/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

using namespace euleralign;

namespace {

constexpr double pi = std::numbers::pi;

HydroState state_of(const TorusGrid& g, RealField rho, RealField u, double t = 0.0) {
  HydroState s;
  s.grid = g;
  s.rho = std::move(rho);
  s.u = std::move(u);
  s.t = t;
  return s;
}

} // namespace

TEST_CASE("scalar observables of the cosine-bump initial state") {
  const TorusGrid g = make_grid(64);
  const DiagnosticsRecord r = record(initial_state(g, "paper-like"), 0.5);

  CHECK(std::abs(r.mass - 2.0 * pi) <= 1e-14 * 2.0 * pi);
  CHECK(std::abs(r.momentum) <= 1e-15);
  CHECK(std::abs(r.e_mass) <= 1e-14);
  CHECK(std::abs(r.v_amplitude - 0.4) <= 1e-14);
  CHECK(std::abs(r.sup_ux - 0.2) <= 1e-13);
  CHECK(std::abs(r.rho_min - 0.5) <= 1e-14);
  CHECK(std::abs(r.rho_max - 1.5) <= 1e-14);

  // e/rho = (0.2 - 0.5 C(1/2)) cos x / (1 + 0.5 cos x), extremal at the
  // endpoints of the density range.
  CHECK(std::abs(r.er_max - 4.613256549262001) <= 1e-12);
  CHECK(std::abs(r.er_min - -1.5377521830873337) <= 1e-12);
  CHECK(r.flock_residual == 0.0);
  CHECK(r.t == 0.0);
}

TEST_CASE("observables of flocking and shear states") {
  const TorusGrid g = make_grid(64);

  const DiagnosticsRecord flock =
      record(state_of(g, RealField::Constant(g.n, 1.3), RealField::Constant(g.n, 0.5)), 0.5);
  CHECK(flock.v_amplitude == 0.0);
  CHECK(flock.sup_ux <= 1e-14);
  CHECK(std::abs(flock.er_max) <= 1e-14);
  CHECK(std::abs(flock.er_min) <= 1e-14);
  CHECK(std::abs(flock.momentum - 1.3 * 0.5 * 2.0 * pi) <= 1e-13);

  const DiagnosticsRecord shear =
      record(state_of(g, RealField::Constant(g.n, 1.0), g.nodes.sin()), 0.5);
  CHECK(std::abs(shear.v_amplitude - 2.0) <= 1e-14);
  CHECK(std::abs(shear.sup_ux - 1.0) <= 1e-13);

  HydroState bad = state_of(g, RealField::Constant(g.n, 1.0), g.nodes.sin());
  bad.u.resize(32);
  CHECK_THROWS_AS(record(bad, 0.5), std::invalid_argument);
}

TEST_CASE("mean velocity comes from the first record") {
  const TorusGrid g = make_grid(32);
  auto mean_of = [&](double c) {
    std::vector<DiagnosticsRecord> recs = {
        record(state_of(g, RealField::Constant(g.n, 1.0), RealField::Constant(g.n, c)), 0.5)};
    return mean_velocity(recs);
  };
  CHECK(std::abs(mean_of(0.3) - 0.3) <= 1e-14);
  CHECK(std::abs(mean_of(1.0) - 1.0) <= 1e-14);

  std::vector<DiagnosticsRecord> recs = {record(initial_state(g, "paper-like"), 0.5)};
  CHECK(std::abs(mean_velocity(recs)) <= 1e-15);
  CHECK_THROWS_AS(mean_velocity({}), std::invalid_argument);
}

TEST_CASE("moving-frame density resamples by a spectral shift") {
  const TorusGrid g = make_grid(32);

  HydroState s = state_of(g, 1.0 + 0.5 * g.nodes.cos() + 0.2 * (3.0 * g.nodes).sin(),
                          RealField::Zero(g.n), 0.0);
  CHECK((moving_frame_density(s, 1.7) - s.rho).abs().maxCoeff() <= 1e-14);

  // Half-period shift of a pure cosine flips its sign.
  HydroState c = state_of(g, g.nodes.cos(), RealField::Zero(g.n), 1.0);
  CHECK((moving_frame_density(c, pi) + g.nodes.cos()).abs().maxCoeff() <= 1e-13);

  // A full period is the identity.
  s.t = 1.0;
  CHECK((moving_frame_density(s, 2.0 * pi) - s.rho).abs().maxCoeff() <= 1e-12);

  // The unpaired top mode shifts as a cosine, so the result stays real and
  // collapses to an amplitude factor.
  HydroState nyq = state_of(g, 2.0 + (16.0 * g.nodes).cos(), RealField::Zero(g.n), 1.0);
  const RealField want = 2.0 + std::cos(16.0 * 0.3) * (16.0 * g.nodes).cos();
  CHECK((moving_frame_density(nyq, 0.3) - want).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("sup-norm gap between frames") {
  const TorusGrid g = make_grid(32);
  const RealField a = g.nodes.cos();
  CHECK(flock_residual(a, a) == 0.0);
  CHECK(std::abs(flock_residual(a, RealField(1.1 * a)) - 0.1) <= 1e-15);
  CHECK_THROWS_AS(flock_residual(a, RealField::Zero(16)), std::invalid_argument);
}

TEST_CASE("exponential decay fitting") {
  std::vector<std::pair<double, double>> series;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.5 * i;
    series.emplace_back(t, 3.0 * std::exp(-0.5 * t));
  }
  const DecayFit fit = fit_decay_rate(series, 0.0, 10.0);
  CHECK(std::abs(fit.rate - 0.5) <= 1e-10);
  CHECK(std::abs(fit.prefactor - 3.0) <= 1e-10);
  CHECK(fit.r_squared >= 1.0 - 1e-12);
  CHECK(fit.points == 21);
  CHECK(fit.window_start == 0.0);
  CHECK(fit.window_end == 10.0);

  // A window cut keeps only interior points.
  const DecayFit mid = fit_decay_rate(series, 2.0, 6.0);
  CHECK(mid.points == 9);
  CHECK(std::abs(mid.rate - 0.5) <= 1e-10);

  std::vector<std::pair<double, double>> flat;
  for (int i = 0; i < 12; ++i) flat.emplace_back(0.25 * i, 2.0);
  const DecayFit zero = fit_decay_rate(flat, 0.0, 3.0);
  CHECK(std::abs(zero.rate) <= 1e-14);
  CHECK(zero.r_squared == 1.0);

  std::vector<std::pair<double, double>> noisy;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.25 * i;
    noisy.emplace_back(t, 3.0 * std::exp(-0.8 * t) * (1.0 + 0.01 * std::sin(7.0 * t)));
  }
  const DecayFit nf = fit_decay_rate(noisy, 0.0, 10.0);
  CHECK(std::abs(nf.rate - 0.8) <= 0.05 * 0.8);
  CHECK(nf.r_squared >= 0.99);

  CHECK_THROWS_AS(fit_decay_rate(series, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("values at the floor truncate the fit window") {
  std::vector<std::pair<double, double>> series;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.5 * i;
    series.emplace_back(t, std::exp(-0.5 * t));
  }
  series[20].second = 1e-15;  // dropout at t = 10
  const DecayFit fit = fit_decay_rate(series, 0.0, 20.0);
  CHECK(fit.points == 20);
  CHECK(std::abs(fit.rate - 0.5) <= 1e-8);
}

TEST_CASE("sharpness ratio of the dissipation at the steepest point") {
  const TorusGrid g = make_grid(32);

  // Scale invariance in the velocity amplitude.
  const RealField shape = g.nodes.sin() + 0.3 * (2.0 * g.nodes).sin();
  const RealField rho = 1.0 + 0.2 * g.nodes.cos();
  const double base = max_principle_ratio(state_of(g, rho, shape), 0.5);
  CHECK(base > 0.0);
  for (double lam : {0.5, 2.0, 10.0}) {
    const double scaled = max_principle_ratio(state_of(g, rho, RealField(lam * shape)), 0.5);
    CHECK(std::abs(scaled - base) <= 1e-10 * base);
  }

  // For u = sin x the slope peaks with |u'| = 1 and V = 2, and the local
  // dissipation of the cosine has the closed form C(a) (2 - 2^{a-1}).
  const double got = max_principle_ratio(
      state_of(g, RealField::Constant(g.n, 1.0), g.nodes.sin()), 0.5);
  const double want =
      frac_constant(0.5) * (2.0 - std::pow(2.0, -0.5)) * std::pow(2.0, 0.5);
  CHECK(std::abs(got - want) <= 1e-8 * want);

  // Both symmetric slope maxima carry the same dissipation, so the
  // smallest-index tie break does not change the value.
  const RealField ux = g.nodes.cos();
  const double d0 = dissipation_functional(g, ux, 0.5, 0);
  const double d16 = dissipation_functional(g, ux, 0.5, 16);
  CHECK(std::abs(d0 - d16) <= 1e-12 * d0);

  CHECK_THROWS_AS(
      max_principle_ratio(state_of(g, rho, RealField::Zero(g.n)), 0.5),
      std::invalid_argument);
}
