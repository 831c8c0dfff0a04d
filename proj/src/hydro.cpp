#include "euleralign/hydro.hpp"

#include "euleralign/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace euleralign {

namespace {

constexpr double vacuum_guard = 1e-8;

void check_stage(const RealField& rho, double t) {
  if (!(rho.minCoeff() > vacuum_guard)) throw vacuum_breach(t);
}

} // namespace

vacuum_breach::vacuum_breach(double when)
    : std::runtime_error("vacuum breach at t = " + std::to_string(when)), t(when) {}

HydroState initial_state(const TorusGrid& grid, const std::string& preset,
                         std::optional<double> rho_amp, std::optional<double> u_amp) {
  double a = preset == "sharp" ? 0.9 : 0.5;
  double b = 0.2;
  if (rho_amp) a = *rho_amp;
  if (u_amp) b = *u_amp;
  if (!(a >= 0.0 && a < 1.0))
    throw std::invalid_argument("rho_amp must lie in [0, 1)");
  if (!std::isfinite(b))
    throw std::invalid_argument("u_amp must be finite");

  HydroState state;
  state.grid = grid;
  state.t = 0.0;
  const Eigen::ArrayXd& x = grid.nodes;
  state.rho = 1.0 + a * x.cos();
  if (preset == "paper-like" || preset == "sharp") {
    state.u = b * x.sin();
  } else if (preset == "multiwave") {
    state.u = b * (x.sin() + 0.5 * (2.0 * x).cos() + 0.25 * (3.0 * x).sin());
  } else {
    throw std::invalid_argument("unknown preset \"" + preset + "\"");
  }
  validate_state(state);
  return state;
}

void validate_state(const HydroState& state) {
  if (state.rho.size() != state.grid.n || state.u.size() != state.grid.n)
    throw std::invalid_argument("state fields do not share the grid");
  if (!(state.rho.minCoeff() > 0.0))
    throw std::invalid_argument("density must be strictly positive");
  if (!std::isfinite(state.t))
    throw std::invalid_argument("state time must be finite");
}

std::pair<RealField, RealField> rhs(const HydroState& state, double alpha) {
  validate_state(state);
  const TorusGrid& g = state.grid;
  RealField drho = -derivative(g, dealias_product(g, state.rho, state.u), 1);
  RealField du = -dealias_product(g, state.u, derivative(g, state.u, 1)) +
                 commutator_force(g, state.rho, state.u, alpha);
  return {std::move(drho), std::move(du)};
}

RealField e_quantity(const HydroState& state, double alpha) {
  validate_state(state);
  return derivative(state.grid, state.u, 1) -
         fractional_laplacian(state.grid, state.rho, alpha);
}

double cfl_dt(const HydroState& state, double alpha, double safety) {
  validate_state(state);
  const double transport = state.grid.dx / (1e-12 + state.u.abs().maxCoeff());
  const double diffusion =
      std::pow(state.grid.dx, alpha) / (frac_constant(alpha) * state.rho.maxCoeff());
  return safety * std::min({transport, diffusion, 1e-2});
}

HydroState step_ssprk3(const HydroState& state, double dt, double alpha) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  validate_state(state);

  HydroState work = state;
  auto [k1r, k1u] = rhs(work, alpha);
  work.rho = state.rho + dt * k1r;
  work.u = state.u + dt * k1u;
  check_stage(work.rho, state.t);

  auto [k2r, k2u] = rhs(work, alpha);
  work.rho = 0.75 * state.rho + 0.25 * (work.rho + dt * k2r);
  work.u = 0.75 * state.u + 0.25 * (work.u + dt * k2u);
  check_stage(work.rho, state.t);

  auto [k3r, k3u] = rhs(work, alpha);
  work.rho = state.rho / 3.0 + 2.0 / 3.0 * (work.rho + dt * k3r);
  work.u = state.u / 3.0 + 2.0 / 3.0 * (work.u + dt * k3u);
  check_stage(work.rho, state.t);

  work.t = state.t + dt;
  return work;
}

RunResult run(const SolverConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
  if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end))
    throw std::invalid_argument("t_end must be nonnegative");
  if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0))
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (config.output_stride < 1)
    throw std::invalid_argument("output_stride must be at least 1");

  const TorusGrid grid = make_grid(config.n);
  RunResult result;
  result.final_state = initial_state(grid, config.preset, config.rho_amp, config.u_amp);
  HydroState& state = result.final_state;

  std::vector<double> snap_times = config.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&] {
    while (next_snap < snap_times.size() && state.t >= snap_times[next_snap] - 1e-9) {
      result.snapshots.push_back(state);
      ++next_snap;
    }
  };

  DiagnosticsRecord first = record(state, config.alpha);
  const double ubar = first.momentum / first.mass;
  RealField prev_frame = moving_frame_density(state, ubar);
  result.records.push_back(first);
  take_snapshots();

  long step = 0;
  while (state.t < config.t_end - 1e-12) {
    double dt = cfl_dt(state, config.alpha, config.cfl_safety);
    if (state.t + dt > config.t_end) dt = config.t_end - state.t;
    state = step_ssprk3(state, dt, config.alpha);
    if (!state.rho.allFinite() || !state.u.allFinite())
      throw std::runtime_error("non-finite field values at t = " + std::to_string(state.t));
    ++step;
    take_snapshots();
    const bool last = state.t >= config.t_end - 1e-12;
    if (step % config.output_stride == 0 || last) {
      DiagnosticsRecord rec = record(state, config.alpha);
      RealField frame = moving_frame_density(state, ubar);
      rec.flock_residual = flock_residual(prev_frame, frame);
      prev_frame = std::move(frame);
      result.records.push_back(rec);
    }
  }
  return result;
}

} // namespace euleralign
