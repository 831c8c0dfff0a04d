#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace euleralign {

struct ParticleState {
  Eigen::ArrayXd positions;  // reduced modulo 2*pi
  Eigen::ArrayXd velocities;
  double t = 0.0;
};

struct ParticleConfig {
  int n_agents = 64;
  double alpha = 0.5;
  double epsilon = 1e-3;  // kernel regularization length
  int k_images = 64;
  double t_end = 8.0;
  double dt = 1e-3;
  std::uint64_t seed = 12345;
  double v_amplitude = 0.5;
  int output_stride = 1;
};

struct ParticleRecord {
  double t = 0.0;
  double v_diameter = 0.0;
  double x_diameter = 0.0;  // smallest arc containing all agents
  double mean_v = 0.0;
};

struct ParticleRunResult {
  ParticleState final_state;
  std::vector<ParticleRecord> records;
};

// Regularized periodization of the alignment kernel:
// sum over |k| <= k_images of (|r + 2*pi*k|^2 + eps^2)^{-(1+alpha)/2} plus the
// tail correction 2 * (2*pi*k_images - pi)^{-alpha} / (2*pi*alpha). The
// distance is folded to min(r, 2*pi - r) first, so the value is symmetric.
double kernel_periodized(double r, double alpha, double epsilon, int k_images);

// Uniform positions in [0, 2*pi) then uniform velocities in
// [-v_amplitude, v_amplitude], all from one seeded generator.
ParticleState initial_particles(const ParticleConfig& config);

// dx_i = v_i; dv_i = (1/N) sum_j kernel(d(x_i, x_j)) (v_j - v_i), accumulated
// pairwise so opposite contributions cancel exactly.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> particle_rhs(const ParticleState& state,
                                                       const ParticleConfig& config);

// Fixed-step RK4 from the seeded initial state, recording every
// output_stride steps. Deterministic for a fixed config.
ParticleRunResult run_particles(const ParticleConfig& config);

// Same integration from a caller-supplied state.
ParticleRunResult run_particles(const ParticleConfig& config, const ParticleState& initial);

} // namespace euleralign
