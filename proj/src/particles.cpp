#include "euleralign/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace euleralign {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void validate_config(const ParticleConfig& c) {
  if (c.n_agents < 2) throw std::invalid_argument("n_agents must be at least 2");
  if (!(c.alpha > 0.0 && c.alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (c.k_images < 8) throw std::invalid_argument("k_images must be at least 8");
  if (!(c.t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(c.v_amplitude >= 0.0)) throw std::invalid_argument("v_amplitude must be nonnegative");
  if (c.output_stride < 1) throw std::invalid_argument("output_stride must be at least 1");
}

double fold(double r) {
  r = std::fmod(r, two_pi);
  if (r < 0.0) r += two_pi;
  return std::min(r, two_pi - r);
}

// Image terms k != 0 plus the tail: the smooth remainder of the kernel once
// the direct term is split off. Defined slightly beyond [0, pi] so the
// interpolation table gets exact ghost values.
double image_part(double r, double alpha, double epsilon, int k_images) {
  double s = 0.0;
  for (int k = k_images; k >= 1; --k) {
    const double dp = two_pi * k + r;
    const double dm = two_pi * k - r;
    s += std::pow(dp * dp + epsilon * epsilon, -0.5 * (1.0 + alpha)) +
         std::pow(dm * dm + epsilon * epsilon, -0.5 * (1.0 + alpha));
  }
  s += 2.0 * std::pow(two_pi * k_images - std::numbers::pi, -alpha) / (two_pi * alpha);
  return s;
}

// Catmull-Rom table of the smooth image part on [0, pi].
struct KernelTable {
  static constexpr int intervals = 4096;
  double h = 0.0;
  std::vector<double> values;  // values[i + 1] = image part at i * h, i = -1..intervals+1

  KernelTable(double alpha, double epsilon, int k_images) {
    h = std::numbers::pi / intervals;
    values.resize(intervals + 3);
    for (int i = -1; i <= intervals + 1; ++i)
      values[i + 1] = image_part(i * h, alpha, epsilon, k_images);
  }

  double eval(double r) const {
    const double u = r / h;
    int i = int(u);
    i = std::clamp(i, 0, intervals - 1);
    const double s = u - i;
    const double* p = values.data() + i;
    const double c0 = 2.0 * p[1];
    const double c1 = p[2] - p[0];
    const double c2 = 2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3];
    const double c3 = -p[0] + 3.0 * p[1] - 3.0 * p[2] + p[3];
    return 0.5 * (c0 + s * (c1 + s * (c2 + s * c3)));
  }
};

// Pairwise force accumulation; each pair contributes +w to one agent and -w
// to the other so the velocity sum is conserved to roundoff.
void alignment_forces(const Eigen::ArrayXd& x, const Eigen::ArrayXd& v,
                      const ParticleConfig& cfg, const KernelTable* table,
                      Eigen::ArrayXd& dv) {
  const int n = int(x.size());
  dv.setZero(n);
  const double inv_n = 1.0 / n;
  const double ee = cfg.epsilon * cfg.epsilon;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = fold(x(i) - x(j));
      const double phi = table
          ? std::pow(d * d + ee, -0.5 * (1.0 + cfg.alpha)) + table->eval(d)
          : kernel_periodized(d, cfg.alpha, cfg.epsilon, cfg.k_images);
      const double w = inv_n * phi * (v(j) - v(i));
      dv(i) += w;
      dv(j) -= w;
    }
  }
}

void check_state(const ParticleConfig& cfg, const ParticleState& state) {
  if (state.positions.size() != cfg.n_agents || state.velocities.size() != cfg.n_agents)
    throw std::invalid_argument("state size does not match n_agents");
  if (!state.positions.allFinite() || !state.velocities.allFinite())
    throw std::invalid_argument("state must be finite");
}

ParticleRecord record_particles(const ParticleState& state) {
  ParticleRecord rec;
  rec.t = state.t;
  rec.v_diameter = state.velocities.maxCoeff() - state.velocities.minCoeff();
  rec.mean_v = state.velocities.mean();

  std::vector<double> sorted(state.positions.data(),
                             state.positions.data() + state.positions.size());
  std::sort(sorted.begin(), sorted.end());
  double max_gap = sorted.front() + two_pi - sorted.back();
  for (std::size_t i = 1; i < sorted.size(); ++i)
    max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
  rec.x_diameter = two_pi - max_gap;
  return rec;
}

} // namespace

double kernel_periodized(double r, double alpha, double epsilon, int k_images) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
  if (k_images < 8) throw std::invalid_argument("k_images must be at least 8");
  const double d = fold(r);
  return std::pow(d * d + epsilon * epsilon, -0.5 * (1.0 + alpha)) +
         image_part(d, alpha, epsilon, k_images);
}

ParticleState initial_particles(const ParticleConfig& config) {
  validate_config(config);
  std::mt19937_64 gen(config.seed);
  std::uniform_real_distribution<double> pos(0.0, two_pi);
  std::uniform_real_distribution<double> vel(-config.v_amplitude, config.v_amplitude);
  ParticleState state;
  state.positions.resize(config.n_agents);
  state.velocities.resize(config.n_agents);
  for (int i = 0; i < config.n_agents; ++i) state.positions(i) = pos(gen);
  for (int i = 0; i < config.n_agents; ++i) state.velocities(i) = vel(gen);
  state.t = 0.0;
  return state;
}

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> particle_rhs(const ParticleState& state,
                                                       const ParticleConfig& config) {
  validate_config(config);
  check_state(config, state);
  Eigen::ArrayXd dv;
  alignment_forces(state.positions, state.velocities, config, nullptr, dv);
  return {state.velocities, std::move(dv)};
}

ParticleRunResult run_particles(const ParticleConfig& config) {
  return run_particles(config, initial_particles(config));
}

ParticleRunResult run_particles(const ParticleConfig& config, const ParticleState& initial) {
  validate_config(config);
  check_state(config, initial);

  ParticleRunResult result;
  ParticleState& state = result.final_state;
  state = initial;
  for (int i = 0; i < config.n_agents; ++i) {
    state.positions(i) = std::fmod(state.positions(i), two_pi);
    if (state.positions(i) < 0.0) state.positions(i) += two_pi;
  }
  result.records.push_back(record_particles(state));

  const KernelTable table(config.alpha, config.epsilon, config.k_images);
  Eigen::ArrayXd k1v, k2v, k3v, k4v;
  long step = 0;
  while (state.t < config.t_end - 1e-12) {
    const double dt = std::min(config.dt, config.t_end - state.t);
    const Eigen::ArrayXd& x = state.positions;
    const Eigen::ArrayXd& v = state.velocities;

    alignment_forces(x, v, config, &table, k1v);
    const Eigen::ArrayXd x2 = x + 0.5 * dt * v;
    const Eigen::ArrayXd v2 = v + 0.5 * dt * k1v;
    alignment_forces(x2, v2, config, &table, k2v);
    const Eigen::ArrayXd x3 = x + 0.5 * dt * v2;
    const Eigen::ArrayXd v3 = v + 0.5 * dt * k2v;
    alignment_forces(x3, v3, config, &table, k3v);
    const Eigen::ArrayXd x4 = x + dt * v3;
    const Eigen::ArrayXd v4 = v + dt * k3v;
    alignment_forces(x4, v4, config, &table, k4v);

    state.positions = x + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
    state.velocities = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    for (int i = 0; i < config.n_agents; ++i) {
      state.positions(i) = std::fmod(state.positions(i), two_pi);
      if (state.positions(i) < 0.0) state.positions(i) += two_pi;
    }
    state.t += dt;
    if (!state.positions.allFinite() || !state.velocities.allFinite())
      throw std::runtime_error("non-finite particle state at t = " + std::to_string(state.t));
    ++step;
    if (step % config.output_stride == 0 || state.t >= config.t_end - 1e-12)
      result.records.push_back(record_particles(state));
  }
  return result;
}

} // namespace euleralign
