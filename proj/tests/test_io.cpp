#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "euleralign/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace euleralign;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "euleralign_test_io";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string thrown_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const std::exception& err) {
    return err.what();
  }
  return "";
}

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return cli_main(int(argv.size()), argv.data());
}

DiagnosticsRecord sample_record(double t, double v) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = std::numbers::pi;
  r.momentum = 1.0 / 3.0;
  r.e_mass = 1e-300;
  r.v_amplitude = v;
  r.sup_ux = 0.75 * v;
  r.sup_uxx = 2.5 * v;
  r.sup_rhox = 0.1;
  r.rho_min = 0.5;
  r.rho_max = 1.5;
  r.er_min = -1.23456789012345678;
  r.er_max = 4.567;
  r.q_min = -0.25;
  r.q_max = 0.5;
  r.flock_residual = 0.125 * v;
  return r;
}

} // namespace

TEST_CASE("config parsing: defaults, overrides, and strictness") {
  const ParsedConfig minimal = parse_config(R"({"mode":"hydro","alpha":0.75})");
  CHECK(minimal.mode == "hydro");
  CHECK(minimal.hydro.alpha == 0.75);
  CHECK(minimal.hydro.n == 512);
  CHECK(minimal.hydro.t_end == 20.0);
  CHECK(minimal.hydro.cfl_safety == 0.4);
  CHECK(minimal.hydro.output_stride == 25);
  CHECK(minimal.hydro.preset == "paper-like");
  CHECK(!minimal.hydro.rho_amp.has_value());
  CHECK(minimal.hydro.snapshot_times == std::vector<double>{5.0, 10.0, 15.0, 20.0});

  const ParsedConfig full = parse_config(
      R"({"mode":"hydro","alpha":1.5,"n":128,"t_end":2.5,"cfl_safety":0.9,)"
      R"("output_stride":4,"preset":"sharp","rho_amp":0.25,"u_amp":0.0,)"
      R"("snapshot_times":[0.5,1.5]})");
  CHECK(full.hydro.n == 128);
  CHECK(full.hydro.preset == "sharp");
  REQUIRE(full.hydro.rho_amp.has_value());
  CHECK(*full.hydro.rho_amp == 0.25);
  CHECK(full.hydro.snapshot_times == std::vector<double>{0.5, 1.5});

  const ParsedConfig part = parse_config(
      R"({"mode":"particles","n_agents":32,"alpha":1.2,"epsilon":0.01,)"
      R"("k_images":16,"t_end":2.0,"dt":0.002,"seed":7,"v_amplitude":1.5,)"
      R"("output_stride":10})");
  CHECK(part.mode == "particles");
  CHECK(part.particles.n_agents == 32);
  CHECK(part.particles.alpha == 1.2);
  CHECK(part.particles.epsilon == 0.01);
  CHECK(part.particles.k_images == 16);
  CHECK(part.particles.seed == 7);
  CHECK(part.particles.output_stride == 10);
}

TEST_CASE("config errors name the key or the line") {
  CHECK(thrown_message(R"({"mode":"hydro","alpha":2.5})").find("alpha") != std::string::npos);
  CHECK(thrown_message(R"({"mode":"hydro","n":100})").find("\"n\"") != std::string::npos);
  CHECK(thrown_message(R"({"mode":"hydro","alpa":0.5})").find("unknown config key") !=
        std::string::npos);
  CHECK(thrown_message(R"({"alpha":0.5})").find("mode") != std::string::npos);
  CHECK(thrown_message(R"({"mode":"fluid"})").find("mode") != std::string::npos);
  CHECK(thrown_message(R"({"mode":"particles","seed":-1})").find("seed") != std::string::npos);
  CHECK(thrown_message(R"({"mode":"particles","dt":0})").find("dt") != std::string::npos);
  CHECK(thrown_message("{\n\"mode\": \"hydro\",\nbogus\n}").find("line 3") != std::string::npos);
  CHECK(thrown_message("[1,2]").find("key-value") != std::string::npos);
}

TEST_CASE("diagnostics CSV: pinned header, LF endings, exact round trip") {
  const fs::path path = work_dir() / "series.csv";
  std::vector<DiagnosticsRecord> records = {sample_record(0.0, 0.4),
                                            sample_record(0.5, 0.31)};
  write_timeseries(records, path.string());

  const std::string text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.substr(0, timeseries_header.size()) == timeseries_header);
  CHECK(text.back() == '\n');
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  const std::vector<DiagnosticsRecord> back = read_timeseries(path.string());
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == records[i].t);
    CHECK(back[i].mass == records[i].mass);
    CHECK(back[i].momentum == records[i].momentum);
    CHECK(back[i].e_mass == records[i].e_mass);
    CHECK(back[i].er_min == records[i].er_min);
    CHECK(back[i].flock_residual == records[i].flock_residual);
  }

  const fs::path missing = work_dir() / "unwritten.csv";
  CHECK_THROWS_AS(write_timeseries({}, missing.string()), std::invalid_argument);
  CHECK(!fs::exists(missing));

  const fs::path wrong = work_dir() / "wrong_header.csv";
  spit(wrong, "time,M,P\n0,1,2\n");
  CHECK_THROWS_AS(read_timeseries(wrong.string()), std::runtime_error);

  const fs::path torn = work_dir() / "torn_row.csv";
  spit(torn, std::string(timeseries_header) + "\n1.0,2.0\n");
  CHECK_THROWS_AS(read_timeseries(torn.string()), std::runtime_error);
}

TEST_CASE("particle CSV header") {
  const fs::path path = work_dir() / "particles.csv";
  ParticleRecord rec;
  rec.t = 0.0;
  rec.v_diameter = 0.9;
  rec.x_diameter = 3.1;
  rec.mean_v = -0.05;
  write_particle_series({rec}, path.string());
  const std::string text = slurp(path);
  CHECK(text.substr(0, particle_series_header.size()) == particle_series_header);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("manifest lifecycle states") {
  const fs::path path = work_dir() / "manifest.json";
  RunManifest m;
  m.command = "run-hydro";
  m.config_json = R"({"alpha":0.5})";
  m.started_at = "2026-01-02T03:04:05Z";
  write_manifest(m, path.string());

  nlohmann::json doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["artifact_version"] == "1.0.0");
  CHECK(doc["status"] == "running");
  CHECK(doc["finished_at"].is_null());
  CHECK(doc["outputs"].is_array());
  CHECK(doc["outputs"].empty());
  CHECK(!doc.contains("message"));

  m.status = "completed";
  m.finished_at = "2026-01-02T03:09:59Z";
  m.outputs = {"timeseries.csv", "snapshot_0.json"};
  write_manifest(m, path.string());
  doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["status"] == "completed");
  CHECK(doc["finished_at"] == "2026-01-02T03:09:59Z");
  CHECK(doc["outputs"].size() == 2);
  CHECK(doc["outputs"][1] == "snapshot_0.json");

  m.status = "error";
  m.message = "boom";
  write_manifest(m, path.string());
  doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["status"] == "error");
  CHECK(doc["message"] == "boom");
}

TEST_CASE("operator verification table") {
  std::ostringstream out;
  CHECK(verify_operators({0.5}, 16, 1e-4, out));
  CHECK(out.str().find("pass") != std::string::npos);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("fractional_laplacian") != std::string::npos);
  CHECK(out.str().find("commutator_force") != std::string::npos);

  std::ostringstream bad;
  CHECK(!verify_operators({0.5}, 16, 1e-15, bad));
  CHECK(bad.str().find("FAIL") != std::string::npos);
}

TEST_CASE("command line exit codes") {
  CHECK(run_cli({"euleralign"}) == 2);
  CHECK(run_cli({"euleralign", "frobnicate"}) == 2);
  CHECK(run_cli({"euleralign", "run-hydro"}) == 2);
  CHECK(run_cli({"euleralign", "--help"}) == 0);

  const fs::path series = work_dir() / "analyze_me.csv";
  std::vector<DiagnosticsRecord> records;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.25 * i;
    DiagnosticsRecord r = sample_record(t, 2.0 * std::exp(-0.7 * t));
    r.flock_residual = i == 0 ? 0.0 : std::exp(-1.3 * t);
    records.push_back(r);
  }
  write_timeseries(records, series.string());

  CHECK(run_cli({"euleralign", "analyze", "--in", series.string(), "--window", "5"}) == 2);
  CHECK(run_cli({"euleralign", "analyze", "--in", "/no/such/file.csv", "--window", "2:8"}) == 1);
  CHECK(run_cli({"euleralign", "analyze", "--in", series.string(), "--window", "2:8"}) == 0);

  const fs::path bad_cfg = work_dir() / "bad.json";
  spit(bad_cfg, R"({"mode":"hydro","alpha":3.0})");
  const fs::path out_dir = work_dir() / "bad_run";
  CHECK(run_cli({"euleralign", "run-hydro", "--config", bad_cfg.string(), "--out",
                 out_dir.string()}) == 2);

  CHECK(run_cli({"euleralign", "verify-operators", "--alpha", "0.5", "--n", "16", "--tol",
                 "1e-15"}) == 1);
}

TEST_CASE("decay rates survive the CSV round trip") {
  const fs::path series = work_dir() / "roundtrip.csv";
  std::vector<DiagnosticsRecord> records;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.25 * i;
    DiagnosticsRecord r = sample_record(t, 2.0 * std::exp(-0.7 * t));
    r.flock_residual = i == 0 ? 0.0 : std::exp(-1.3 * t);
    records.push_back(r);
  }
  write_timeseries(records, series.string());
  const std::vector<DiagnosticsRecord> back = read_timeseries(series.string());
  const struct {
    double DiagnosticsRecord::*member;
    double rate;
  } columns[] = {{&DiagnosticsRecord::v_amplitude, 0.7},
                 {&DiagnosticsRecord::sup_ux, 0.7},
                 {&DiagnosticsRecord::sup_uxx, 0.7},
                 {&DiagnosticsRecord::flock_residual, 1.3}};
  for (const auto& col : columns) {
    std::vector<std::pair<double, double>> pts;
    for (const DiagnosticsRecord& r : back) {
      if (pts.empty() && r.*col.member < 1e-14) continue;
      pts.emplace_back(r.t, r.*col.member);
    }
    const DecayFit fit = fit_decay_rate(pts, 2.0, 8.0);
    CHECK(std::abs(fit.rate - col.rate) <= 1e-10);
    CHECK(fit.r_squared >= 1.0 - 1e-10);
  }
}

TEST_CASE("hydro pipeline writes a complete, reproducible artifact set") {
  const fs::path cfg_path = work_dir() / "tiny.json";
  spit(cfg_path,
       R"({"mode":"hydro","n":32,"t_end":0.05,"output_stride":2,"snapshot_times":[0.0,0.05]})");
  const fs::path out_a = work_dir() / "run_a";
  const fs::path out_b = work_dir() / "run_b";

  CHECK(run_cli({"euleralign", "run-hydro", "--config", cfg_path.string(), "--out",
                 out_a.string()}) == 0);
  CHECK(run_cli({"euleralign", "run-hydro", "--config", cfg_path.string(), "--out",
                 out_b.string()}) == 0);

  const nlohmann::json manifest = nlohmann::json::parse(slurp(out_a / "manifest.json"));
  CHECK(manifest["status"] == "completed");
  CHECK(manifest["command"] == "run-hydro");
  CHECK(!manifest["finished_at"].is_null());
  REQUIRE(manifest["outputs"].size() == 3);
  CHECK(manifest["outputs"][0] == "timeseries.csv");
  CHECK(manifest["outputs"][1] == "snapshot_0.json");

  CHECK(manifest["config"]["n"] == 32);
  CHECK(manifest["config"]["alpha"] == 0.5);

  const nlohmann::json snap = nlohmann::json::parse(slurp(out_a / "snapshot_0.json"));
  CHECK(snap["n"] == 32);
  CHECK(snap["t"] == 0.0);
  CHECK(snap["alpha"] == 0.5);
  CHECK(snap["rho"].size() == 32);
  CHECK(snap["u"].size() == 32);
  CHECK(std::abs(snap["rho"][0].get<double>() - 1.5) <= 1e-15);

  CHECK(slurp(out_a / "timeseries.csv") == slurp(out_b / "timeseries.csv"));
  CHECK(slurp(out_a / "snapshot_1.json") == slurp(out_b / "snapshot_1.json"));

  const std::vector<DiagnosticsRecord> recs = read_timeseries((out_a / "timeseries.csv").string());
  CHECK(recs.size() >= 2);
  CHECK(recs.front().t == 0.0);
  CHECK(std::abs(recs.back().t - 0.05) <= 1e-12);
}

TEST_CASE("particle pipeline emits its series") {
  const fs::path cfg_path = work_dir() / "tiny_particles.json";
  spit(cfg_path, R"({"mode":"particles","n_agents":8,"t_end":0.01,"output_stride":5})");
  const fs::path out = work_dir() / "run_p";
  CHECK(run_cli({"euleralign", "run-particles", "--config", cfg_path.string(), "--out",
                 out.string()}) == 0);
  const nlohmann::json manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "completed");
  REQUIRE(manifest["outputs"].size() == 1);
  CHECK(manifest["outputs"][0] == "particles.csv");
  const std::string text = slurp(out / "particles.csv");
  CHECK(text.substr(0, particle_series_header.size()) == particle_series_header);
  CHECK(text.find('\r') == std::string::npos);
}
