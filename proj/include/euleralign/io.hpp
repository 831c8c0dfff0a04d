#pragma once

#include "euleralign/diagnostics.hpp"
#include "euleralign/hydro.hpp"
#include "euleralign/particles.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace euleralign {

struct ParsedConfig {
  std::string mode;  // "hydro" or "particles"
  SolverConfig hydro;
  ParticleConfig particles;
};

// Strict JSON key-value document. A "mode" key selects the config type,
// omitted keys take their defaults, unknown keys are rejected, parse errors
// carry a line number, and range errors name the offending key.
ParsedConfig parse_config(const std::string& text);

inline constexpr std::string_view timeseries_header =
    "t,M,P,e_mass,V,sup_ux,sup_uxx,sup_rhox,rho_min,rho_max,er_min,er_max,q_min,q_max,flock_residual";

inline constexpr std::string_view particle_series_header = "t,v_diameter,x_diameter,mean_v";

// CSV with the pinned header, one row per record, 17 significant digits,
// LF line endings. Refuses empty input before touching the filesystem.
void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path);

std::vector<DiagnosticsRecord> read_timeseries(const std::string& path);

void write_particle_series(const std::vector<ParticleRecord>& records, const std::string& path);

// Run metadata kept next to the data files. The manifest reaches disk in
// "running" state before any data file and is rewritten on exit, so every
// emitted file is listed in exactly one finalized manifest.
struct RunManifest {
  std::string artifact_version = "1.0.0";
  std::string command;
  std::string config_json;  // resolved parameters, serialized JSON
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // empty while running
  std::string status = "running";  // running | completed | error
  std::string message;             // failure detail when status is "error"
  std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// Spectral operators against the quadrature oracle on f = exp(cos x) and
// (rho, u) = (1 + 0.5 cos x, sin x): one table row per operator and alpha.
// True when every sup error is within tol.
bool verify_operators(const std::vector<double>& alphas, int n, double tol, std::ostream& out);

int cli_main(int argc, char** argv);

} // namespace euleralign
