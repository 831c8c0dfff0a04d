#pragma once

#include "euleralign/diagnostics.hpp"
#include "euleralign/grid.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace euleralign {

struct HydroState {
  TorusGrid grid;
  RealField rho;
  RealField u;
  double t = 0.0;
};

struct SolverConfig {
  double alpha = 0.5;
  int n = 512;
  double t_end = 20.0;
  double cfl_safety = 0.4;
  int output_stride = 25;
  std::string preset = "paper-like";
  std::optional<double> rho_amp;  // preset default when unset
  std::optional<double> u_amp;
  std::vector<double> snapshot_times = {5.0, 10.0, 15.0, 20.0};
};

struct RunResult {
  HydroState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<HydroState> snapshots;
};

// Thrown when the density drops to the vacuum guard (1e-8) at any stage.
class vacuum_breach : public std::runtime_error {
 public:
  explicit vacuum_breach(double when);
  double t;
};

// Presets: "paper-like" rho = 1 + A cos x, u = B sin x with A = 0.5, B = 0.2;
// "sharp" the same with A = 0.9; "multiwave" with u carrying modes 1-3,
// u = B (sin x + 0.5 cos 2x + 0.25 sin 3x).
HydroState initial_state(const TorusGrid& grid, const std::string& preset,
                         std::optional<double> rho_amp = {},
                         std::optional<double> u_amp = {});

void validate_state(const HydroState& state);

// drho = -d/dx dealias(rho * u); du = -dealias(u, u_x) + commutator force.
std::pair<RealField, RealField> rhs(const HydroState& state, double alpha);

// e = u_x - fractional_laplacian(rho).
RealField e_quantity(const HydroState& state, double alpha);

// safety * min(dx / (1e-12 + max|u|), dx^alpha / (C(alpha) * max rho), 1e-2).
double cfl_dt(const HydroState& state, double alpha, double safety);

// One Shu-Osher SSP-RK3 step; the vacuum guard runs after every stage.
HydroState step_ssprk3(const HydroState& state, double dt, double alpha);

// Adaptive-step integration to t_end with a diagnostics record every
// output_stride steps (plus the initial and final states) and a field
// snapshot at each requested time. Deterministic for a fixed config.
RunResult run(const SolverConfig& config);

} // namespace euleralign
