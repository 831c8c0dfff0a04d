#include "euleralign/io.hpp"

#include "euleralign/quadrature.hpp"
#include "euleralign/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace euleralign {

using nlohmann::json;

namespace {

// Command-line or config misuse; maps to exit code 2 instead of 1.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void reject_key(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config key \"" + key + "\" " + what);
}

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  const std::size_t stop = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < stop; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

double as_real(const json& value, const std::string& key) {
  if (!value.is_number()) reject_key(key, "must be a number");
  return value.get<double>();
}

long as_integer(const json& value, const std::string& key) {
  if (!value.is_number_integer()) reject_key(key, "must be an integer");
  return value.get<long>();
}

std::string as_text(const json& value, const std::string& key) {
  if (!value.is_string()) reject_key(key, "must be a string");
  return value.get<std::string>();
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json hydro_config_json(const SolverConfig& c) {
  const double a = c.rho_amp ? *c.rho_amp : (c.preset == "sharp" ? 0.9 : 0.5);
  const double b = c.u_amp ? *c.u_amp : 0.2;
  return json{{"mode", "hydro"},
              {"alpha", c.alpha},
              {"n", c.n},
              {"t_end", c.t_end},
              {"cfl_safety", c.cfl_safety},
              {"output_stride", c.output_stride},
              {"preset", c.preset},
              {"rho_amp", a},
              {"u_amp", b},
              {"snapshot_times", c.snapshot_times}};
}

json particle_config_json(const ParticleConfig& c) {
  return json{{"mode", "particles"},
              {"n_agents", c.n_agents},
              {"alpha", c.alpha},
              {"epsilon", c.epsilon},
              {"k_images", c.k_images},
              {"t_end", c.t_end},
              {"dt", c.dt},
              {"seed", c.seed},
              {"v_amplitude", c.v_amplitude},
              {"output_stride", c.output_stride}};
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_snapshot(const HydroState& state, double alpha, const std::string& path) {
  json doc;
  doc["n"] = state.grid.n;
  doc["period"] = state.grid.period;
  doc["t"] = state.t;
  doc["alpha"] = alpha;
  doc["rho"] = std::vector<double>(state.rho.data(), state.rho.data() + state.rho.size());
  doc["u"] = std::vector<double>(state.u.data(), state.u.data() + state.u.size());
  write_text_file(path, doc.dump(2) + "\n");
}

ParsedConfig load_config(const std::string& path, const std::string& want_mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ParsedConfig parsed;
  try {
    parsed = parse_config(buffer.str());
  } catch (const std::exception& err) {
    throw usage_error(err.what());
  }
  if (parsed.mode != want_mode)
    throw usage_error("config mode \"" + parsed.mode + "\" does not match the subcommand");
  return parsed;
}

int run_hydro_command(const std::string& config_path, const std::string& out_dir) {
  const ParsedConfig parsed = load_config(config_path, "hydro");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  const std::string manifest_path = (out / "manifest.json").string();

  RunManifest manifest;
  manifest.command = "run-hydro";
  manifest.config_json = hydro_config_json(parsed.hydro).dump();
  manifest.started_at = utc_now();
  write_manifest(manifest, manifest_path);

  try {
    const RunResult result = run(parsed.hydro);
    write_timeseries(result.records, (out / "timeseries.csv").string());
    manifest.outputs.push_back("timeseries.csv");
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      const std::string name = "snapshot_" + std::to_string(i) + ".json";
      write_snapshot(result.snapshots[i], parsed.hydro.alpha, (out / name).string());
      manifest.outputs.push_back(name);
    }
    manifest.status = "completed";
  } catch (const std::exception& err) {
    manifest.status = "error";
    manifest.message = err.what();
    manifest.finished_at = utc_now();
    write_manifest(manifest, manifest_path);
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  manifest.finished_at = utc_now();
  write_manifest(manifest, manifest_path);
  return 0;
}

int run_particles_command(const std::string& config_path, const std::string& out_dir) {
  const ParsedConfig parsed = load_config(config_path, "particles");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  const std::string manifest_path = (out / "manifest.json").string();

  RunManifest manifest;
  manifest.command = "run-particles";
  manifest.config_json = particle_config_json(parsed.particles).dump();
  manifest.started_at = utc_now();
  write_manifest(manifest, manifest_path);

  try {
    const ParticleRunResult result = run_particles(parsed.particles);
    write_particle_series(result.records, (out / "particles.csv").string());
    manifest.outputs.push_back("particles.csv");
    manifest.status = "completed";
  } catch (const std::exception& err) {
    manifest.status = "error";
    manifest.message = err.what();
    manifest.finished_at = utc_now();
    write_manifest(manifest, manifest_path);
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  manifest.finished_at = utc_now();
  write_manifest(manifest, manifest_path);
  return 0;
}

int analyze_command(const std::string& in_path, const std::string& window) {
  double t0 = 0.0, t1 = 0.0;
  if (std::sscanf(window.c_str(), "%lf:%lf", &t0, &t1) != 2 || !(t1 > t0))
    throw usage_error("window must look like T0:T1 with T1 > T0");
  const std::vector<DiagnosticsRecord> records = read_timeseries(in_path);

  const std::pair<const char*, double DiagnosticsRecord::*> columns[] = {
      {"V", &DiagnosticsRecord::v_amplitude},
      {"sup_ux", &DiagnosticsRecord::sup_ux},
      {"sup_uxx", &DiagnosticsRecord::sup_uxx},
      {"flock_residual", &DiagnosticsRecord::flock_residual},
  };
  json fits;
  for (const auto& [name, member] : columns) {
    std::vector<std::pair<double, double>> series;
    for (const DiagnosticsRecord& rec : records) {
      if (series.empty() && rec.*member < 1e-14) continue;  // leading zeros (t = 0 residual)
      series.emplace_back(rec.t, rec.*member);
    }
    const DecayFit fit = fit_decay_rate(series, t0, t1);
    fits[name] = json{{"rate", fit.rate},
                      {"prefactor", fit.prefactor},
                      {"r_squared", fit.r_squared},
                      {"window", {fit.window_start, fit.window_end}},
                      {"points", fit.points}};
  }
  const json doc{{"input", in_path}, {"window", {t0, t1}}, {"fits", fits}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

} // namespace

ParsedConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::runtime_error("config parse error at line " +
                             std::to_string(line_of_byte(text, err.byte)) + ": " + err.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config must be a key-value document");
  const auto mode_it = doc.find("mode");
  if (mode_it == doc.end()) throw std::invalid_argument("config key \"mode\" is required");

  ParsedConfig parsed;
  parsed.mode = as_text(*mode_it, "mode");
  if (parsed.mode == "hydro") {
    SolverConfig& c = parsed.hydro;
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") {
      } else if (key == "alpha") {
        c.alpha = as_real(value, key);
        if (!(c.alpha > 0.0 && c.alpha < 2.0)) reject_key(key, "must lie in (0, 2)");
      } else if (key == "n") {
        const long n = as_integer(value, key);
        if (n < 16 || (n & (n - 1)) != 0)
          reject_key(key, "must be a power of two, at least 16");
        c.n = int(n);
      } else if (key == "t_end") {
        c.t_end = as_real(value, key);
        if (!(c.t_end >= 0.0)) reject_key(key, "must be nonnegative");
      } else if (key == "cfl_safety") {
        c.cfl_safety = as_real(value, key);
        if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) reject_key(key, "must lie in (0, 1]");
      } else if (key == "output_stride") {
        const long stride = as_integer(value, key);
        if (stride < 1) reject_key(key, "must be at least 1");
        c.output_stride = int(stride);
      } else if (key == "preset") {
        c.preset = as_text(value, key);
        if (c.preset != "paper-like" && c.preset != "sharp" && c.preset != "multiwave")
          reject_key(key, "must be one of paper-like, sharp, multiwave");
      } else if (key == "rho_amp") {
        const double a = as_real(value, key);
        if (!(a >= 0.0 && a < 1.0)) reject_key(key, "must lie in [0, 1)");
        c.rho_amp = a;
      } else if (key == "u_amp") {
        const double b = as_real(value, key);
        if (!std::isfinite(b)) reject_key(key, "must be finite");
        c.u_amp = b;
      } else if (key == "snapshot_times") {
        if (!value.is_array()) reject_key(key, "must be an array of times");
        c.snapshot_times.clear();
        for (const auto& item : value) {
          const double t = as_real(item, key);
          if (!(t >= 0.0)) reject_key(key, "entries must be nonnegative");
          c.snapshot_times.push_back(t);
        }
      } else {
        throw std::invalid_argument("unknown config key \"" + key + "\"");
      }
    }
  } else if (parsed.mode == "particles") {
    ParticleConfig& c = parsed.particles;
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") {
      } else if (key == "n_agents") {
        const long n = as_integer(value, key);
        if (n < 2) reject_key(key, "must be at least 2");
        c.n_agents = int(n);
      } else if (key == "alpha") {
        c.alpha = as_real(value, key);
        if (!(c.alpha > 0.0 && c.alpha < 2.0)) reject_key(key, "must lie in (0, 2)");
      } else if (key == "epsilon") {
        c.epsilon = as_real(value, key);
        if (!(c.epsilon > 0.0)) reject_key(key, "must be positive");
      } else if (key == "k_images") {
        const long k = as_integer(value, key);
        if (k < 8) reject_key(key, "must be at least 8");
        c.k_images = int(k);
      } else if (key == "t_end") {
        c.t_end = as_real(value, key);
        if (!(c.t_end >= 0.0)) reject_key(key, "must be nonnegative");
      } else if (key == "dt") {
        c.dt = as_real(value, key);
        if (!(c.dt > 0.0)) reject_key(key, "must be positive");
      } else if (key == "seed") {
        if (!value.is_number_integer() && !value.is_number_unsigned())
          reject_key(key, "must be a nonnegative integer");
        if (value.is_number_integer() && value.get<long long>() < 0)
          reject_key(key, "must be a nonnegative integer");
        c.seed = value.get<std::uint64_t>();
      } else if (key == "v_amplitude") {
        c.v_amplitude = as_real(value, key);
        if (!(c.v_amplitude >= 0.0)) reject_key(key, "must be nonnegative");
      } else if (key == "output_stride") {
        const long stride = as_integer(value, key);
        if (stride < 1) reject_key(key, "must be at least 1");
        c.output_stride = int(stride);
      } else {
        throw std::invalid_argument("unknown config key \"" + key + "\"");
      }
    }
  } else {
    reject_key("mode", "must be \"hydro\" or \"particles\"");
  }
  return parsed;
}

void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("records must be nonempty");
  std::string body;
  body.reserve(64 + records.size() * 320);
  body.append(timeseries_header).push_back('\n');
  for (const DiagnosticsRecord& r : records) {
    const double row[] = {r.t,       r.mass,    r.momentum, r.e_mass, r.v_amplitude,
                          r.sup_ux,  r.sup_uxx, r.sup_rhox, r.rho_min, r.rho_max,
                          r.er_min,  r.er_max,  r.q_min,    r.q_max,   r.flock_residual};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      if (i) body.push_back(',');
      body.append(format_real(row[i]));
    }
    body.push_back('\n');
  }
  write_text_file(path, body);
}

std::vector<DiagnosticsRecord> read_timeseries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + " is empty");
  if (line != timeseries_header)
    throw std::runtime_error(path + " does not carry the expected header");

  std::vector<DiagnosticsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DiagnosticsRecord r;
    double* slots[] = {&r.t,       &r.mass,    &r.momentum, &r.e_mass, &r.v_amplitude,
                       &r.sup_ux,  &r.sup_uxx, &r.sup_rhox, &r.rho_min, &r.rho_max,
                       &r.er_min,  &r.er_max,  &r.q_min,    &r.q_max,   &r.flock_residual};
    std::size_t field = 0;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t stop = std::min(line.find(',', start), line.size());
      if (field >= std::size(slots)) throw std::runtime_error(path + ": too many columns");
      try {
        *slots[field++] = std::stod(line.substr(start, stop - start));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": malformed number in row " +
                                 std::to_string(records.size() + 1));
      }
      start = stop + 1;
    }
    if (field != std::size(slots))
      throw std::runtime_error(path + ": wrong column count in row " +
                               std::to_string(records.size() + 1));
    records.push_back(r);
  }
  return records;
}

void write_particle_series(const std::vector<ParticleRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("records must be nonempty");
  std::string body;
  body.reserve(32 + records.size() * 96);
  body.append(particle_series_header).push_back('\n');
  for (const ParticleRecord& r : records) {
    body.append(format_real(r.t)).push_back(',');
    body.append(format_real(r.v_diameter)).push_back(',');
    body.append(format_real(r.x_diameter)).push_back(',');
    body.append(format_real(r.mean_v)).push_back('\n');
  }
  write_text_file(path, body);
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json doc;
  doc["artifact_version"] = manifest.artifact_version;
  doc["command"] = manifest.command;
  doc["config"] = json::parse(manifest.config_json);
  doc["started_at"] = manifest.started_at;
  doc["finished_at"] = manifest.finished_at.empty() ? json() : json(manifest.finished_at);
  doc["status"] = manifest.status;
  if (!manifest.message.empty()) doc["message"] = manifest.message;
  doc["outputs"] = manifest.outputs;
  write_text_file(path, doc.dump(2) + "\n");
}

bool verify_operators(const std::vector<double>& alphas, int n, double tol, std::ostream& out) {
  const TorusGrid g = make_grid(n);
  const RealField f = g.nodes.cos().exp();
  const RealField rho = 1.0 + 0.5 * g.nodes.cos();
  const RealField u = g.nodes.sin();

  bool all_ok = true;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %-7s %-6s %-13s %-11s %s\n", "operator", "alpha", "n",
                "sup_error", "tol", "status");
  out << buf;
  for (double alpha : alphas) {
    const double lap_err =
        (fractional_laplacian(g, f, alpha) - quad_fractional_laplacian_field(g, f, alpha))
            .abs()
            .maxCoeff();
    const double com_err =
        (commutator_force(g, rho, u, alpha) - quad_commutator_field(g, rho, u, alpha))
            .abs()
            .maxCoeff();
    const std::pair<const char*, double> rows[] = {{"fractional_laplacian", lap_err},
                                                   {"commutator_force", com_err}};
    for (const auto& [name, err] : rows) {
      const bool ok = err <= tol;
      all_ok = all_ok && ok;
      std::snprintf(buf, sizeof buf, "%-22s %-7.4g %-6d %-13.3e %-11.3e %s\n", name, alpha, n,
                    err, tol, ok ? "pass" : "FAIL");
      out << buf;
    }
  }
  return all_ok;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral simulator for the fractional Euler alignment system"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  CLI::App* hydro_cmd = app.add_subcommand("run-hydro", "Integrate the alignment system");
  hydro_cmd->add_option("--config", config_path, "Config document (JSON)")->required();
  hydro_cmd->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* particles_cmd = app.add_subcommand("run-particles", "Integrate the agent system");
  particles_cmd->add_option("--config", config_path, "Config document (JSON)")->required();
  particles_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::vector<double> alphas = {0.25, 0.5, 0.75, 1.0, 1.5};
  int verify_n = 256;
  double tol = 1e-6;
  CLI::App* verify_cmd =
      app.add_subcommand("verify-operators", "Compare spectral operators against quadrature");
  verify_cmd->add_option("--alpha", alphas, "Comma-separated alpha list")->delimiter(',');
  verify_cmd->add_option("--n", verify_n, "Grid size (power of two, at least 16)");
  verify_cmd->add_option("--tol", tol, "Sup-norm tolerance");

  std::string in_path;
  std::string window;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Fit decay rates from a diagnostics CSV");
  analyze_cmd->add_option("--in", in_path, "Diagnostics CSV")->required();
  analyze_cmd->add_option("--window", window, "Fit window T0:T1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (hydro_cmd->parsed()) return run_hydro_command(config_path, out_dir);
    if (particles_cmd->parsed()) return run_particles_command(config_path, out_dir);
    if (verify_cmd->parsed())
      return verify_operators(alphas, verify_n, tol, std::cout) ? 0 : 1;
    return analyze_command(in_path, window);
  } catch (const usage_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}

} // namespace euleralign
