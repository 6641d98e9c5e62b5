#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "gfdl/errors.hpp"
#include "gfdl/model.hpp"
#include "gfdl/runner.hpp"

namespace fs = std::filesystem;
using namespace gfdl;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gfdl_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Result {
  int code = -1;
  std::string output;
};

Result run(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.string() + "' && '" GFDL_CLI_PATH "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(log)};
}

const char* kFig2 =
    "[profile]\nkind = glauber_fock\nrho = 1\nsites = 60\n"
    "[drive]\nkind = sinusoidal\nomega_over_rho = 0.5\ndl_root = 1\n"
    "[run]\nsteps_per_period = 2000\nperiods = 2\n";

// CSV column by header name.
std::vector<std::string> column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t idx = 0;
  {
    std::istringstream h(line);
    std::string cell;
    std::size_t i = 0;
    bool found = false;
    while (std::getline(h, cell, ',')) {
      if (cell == name) {
        idx = i;
        found = true;
      }
      ++i;
    }
    REQUIRE(found);
  }
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string cell;
    for (std::size_t i = 0; i <= idx; ++i) std::getline(r, cell, ',');
    out.push_back(cell);
  }
  return out;
}

std::vector<double> numbers(const std::vector<std::string>& cells) {
  std::vector<double> v;
  for (const auto& c : cells) v.push_back(std::strtod(c.c_str(), nullptr));
  return v;
}

}  // namespace

TEST_CASE("simulate writes CSV, observables and a manifest") {
  const fs::path dir = scratch("simulate");
  write(dir / "fig2.ini", std::string(kFig2) + "exact_oracle = true\n[output]\ndirectory = out\n");
  const Result r = run(dir, "simulate fig2.ini");
  REQUIRE(r.code == 0);
  const auto manifest = nlohmann::json::parse(read(dir / "out" / "fig2_manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["config"]["drive"]["dl_root"] == "1");
  CHECK(manifest["version"] == cli::kVersion);
  REQUIRE(manifest["outputs"].size() == 2);
  for (const auto& f : manifest["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
  CHECK(manifest["summary"]["revival_T"].get<double>() > 0.999);
  CHECK(manifest["summary"]["max_exact_deviation"].get<double>() < 1e-5);
  const std::string obs = read(dir / "out" / "fig2_observables.csv");
  CHECK(obs.rfind("t,revival,norm,mean_n,spread_n,participation,leakage,exact_deviation\n", 0) == 0);
}

TEST_CASE("identical config gives byte-identical CSV") {
  const fs::path dir = scratch("determinism");
  write(dir / "a.ini", std::string(kFig2) + "[output]\ndirectory = one\nprefix = run\n");
  write(dir / "b.ini", std::string(kFig2) + "[output]\ndirectory = two\nprefix = run\n");
  REQUIRE(run(dir, "simulate a.ini").code == 0);
  REQUIRE(run(dir, "simulate b.ini").code == 0);
  CHECK(read(dir / "one" / "run_trajectory.csv") == read(dir / "two" / "run_trajectory.csv"));
  CHECK(read(dir / "one" / "run_observables.csv") == read(dir / "two" / "run_observables.csv"));
  CHECK(!read(dir / "one" / "run_trajectory.csv").empty());
}

TEST_CASE("zero duration gives a single sample with P_r = 1") {
  const fs::path dir = scratch("empty");
  write(dir / "e.ini", "[drive]\nkind = sinusoidal\nomega = 1\nF0 = 1\n[run]\nt_end = 0\n");
  REQUIRE(run(dir, "simulate e.ini").code == 0);
  const std::string obs = read(dir / "e_observables.csv");
  CHECK(numbers(column(obs, "revival")) == std::vector<double>{1.0});
  CHECK(numbers(column(read(dir / "e_trajectory.csv"), "t")).size() == 61);
}

TEST_CASE("config errors exit 1 with the field name") {
  const fs::path dir = scratch("errors");
  const std::pair<const char*, const char*> cases[] = {
      {"[drive]\nkind = sinusoidal\nomega = -1\nF0 = 1\n", "drive.omega"},
      {"[drive]\nkind = sinusoidal\nomega = 1\n", "drive.F0"},
      {"[drive]\nkind = wobble\n", "drive.kind"},
      {"[profile]\nsites = many\n", "profile.sites"},
      {"[run]\nt_end = 1\ninitial_site = 99\n", "run.initial_site"},
      {"[run]\nt_end = 1\ndt = 0\n", "run.dt"},
      {"[run]\nt_end = 1\nspeed = 3\n", "run.speed"},
      {"[run]\nperiods = 2\n", "run.periods"},
  };
  int i = 0;
  for (const auto& [text, field] : cases) {
    const std::string name = "bad" + std::to_string(i++) + ".ini";
    write(dir / name, text);
    const Result r = run(dir, "simulate " + name);
    CHECK(r.code == 1);
    CHECK(r.output.find(field) != std::string::npos);
  }
  CHECK(run(dir, "simulate missing.ini").code == 1);
  CHECK(run(dir, "frobnicate").code == 1);
}

TEST_CASE("leakage is a warning, or exit 2 when requested") {
  const fs::path dir = scratch("leak");
  const std::string base = "[profile]\nsites = 8\n[run]\nt_end = 3\n";
  write(dir / "warn.ini", base);
  const Result w = run(dir, "simulate warn.ini");
  CHECK(w.code == 0);
  const auto manifest = nlohmann::json::parse(read(dir / "warn_manifest.json"));
  CHECK(manifest["warnings"].size() == 1);
  write(dir / "fail.ini", base + "fail_on_leakage = true\n");
  CHECK(run(dir, "simulate fail.ini").code == 2);
}

TEST_CASE("dl-roots subcommand") {
  const fs::path dir = scratch("roots");
  const Result r = run(dir, "dl-roots --family sinusoidal --omega 0.5 --count 2");
  REQUIRE(r.code == 0);
  const auto ratios = numbers(column(r.output, "F0_over_omega"));
  REQUIRE(ratios.size() == 2);
  CHECK(std::abs(ratios[0] - 2.404826) < 1e-6);
  CHECK(std::abs(ratios[1] - 5.5201) < 1e-3);
  CHECK(run(dir, "dl-roots --omega -1").code == 1);
}

TEST_CASE("heatmap renders and rejects malformed CSV") {
  const fs::path dir = scratch("heatmap");
  write(dir / "h.ini", std::string(kFig2));
  REQUIRE(run(dir, "simulate h.ini").code == 0);
  REQUIRE(run(dir, "heatmap h_trajectory.csv -o h.svg").code == 0);
  const std::string svg = read(dir / "h.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);

  write(dir / "one.csv", "t,n,re,im,abs2\n0,0,1,0,1\n0,1,0,0,0\n");
  REQUIRE(run(dir, "heatmap one.csv -o one.svg").code == 0);

  write(dir / "bad.csv", "t,n,re,im,abs2\n0,0,1,0,1\n0,1,0,0,0\n0.5,0,1,0\n");
  const Result bad = run(dir, "heatmap bad.csv -o bad.svg");
  CHECK(bad.code == 1);
  CHECK(bad.output.find("row 4") != std::string::npos);
}

TEST_CASE("spectra subcommand: Wannier-Stark spacing") {
  const fs::path dir = scratch("stark");
  write(dir / "s.ini", "[profile]\nsites = 80\n[spectra]\nmode = stark\nF0_over_rho = 0.5\n");
  REQUIRE(run(dir, "spectra s.ini").code == 0);
  const std::string csv = read(dir / "s_stark.csv");
  const auto conv = column(csv, "converged");
  const auto spacing = numbers(column(csv, "spacing"));
  int good = 0;
  for (std::size_t i = 0; i + 1 < conv.size(); ++i) {
    if (conv[i] == "1" && conv[i + 1] == "1" && std::abs(spacing[i] - 0.5) < 1e-6 * 0.5) ++good;
  }
  CHECK(good >= 30);
  write(dir / "m.ini", "[spectra]\nmode = spin\n");
  CHECK(run(dir, "spectra m.ini").code == 1);
}

TEST_CASE("spectra subcommand: quasienergy collapse") {
  const fs::path dir = scratch("floquet");
  const std::string drive = "[drive]\nkind = sinusoidal\nomega_over_rho = 0.5\ndl_root = 1\n"
                            "[spectra]\nmode = monodromy\nsteps_per_period = 1000\n";
  write(dir / "gf.ini", "[profile]\nsites = 30\n" + drive);
  write(dir / "un.ini", "[profile]\nkind = uniform\nsites = 30\n" + drive);
  REQUIRE(run(dir, "spectra gf.ini").code == 0);
  REQUIRE(run(dir, "spectra un.ini").code == 0);
  const auto gf = nlohmann::json::parse(read(dir / "gf_manifest.json"))["summary"];
  const auto un = nlohmann::json::parse(read(dir / "un_manifest.json"))["summary"];
  CHECK(gf["converged_levels"].get<int>() > 0);
  CHECK(gf["spread_converged"].get<double>() < 1e-4 * 0.5);
  CHECK(un["spread_all"].get<double>() > 100.0 * gf["spread_converged"].get<double>());
  CHECK(read(dir / "gf_quasienergies.csv").rfind("index,value,converged\n", 0) == 0);
}

TEST_CASE("single-point sweep reproduces the simulate scalars") {
  const fs::path dir = scratch("single");
  const std::string body = std::string(kFig2);
  write(dir / "sim.ini", body);
  write(dir / "sweep.ini", body + "[sweep]\nparameter = omega_over_rho\nstart = 0.5\nstop = 0.5\npoints = 1\nperiods = 2\n");
  const auto sim = cli::run_simulate(dir / "sim.ini");
  (void)sim;
  const auto sw = cli::run_sweep(dir / "sweep.ini");
  (void)sw;
  // The configs default their output to the working directory; read them back from there.
  const auto summary = nlohmann::json::parse(read("sim_manifest.json"))["summary"];
  const std::string csv = read("sweep_sweep.csv");
  CHECK(numbers(column(csv, "revival_T"))[0] == summary["revival_T"].get<double>());
  CHECK(numbers(column(csv, "self_imaging_error"))[0] == summary["self_imaging_error"].get<double>());
  CHECK(numbers(column(csv, "max_self_imaging_error"))[0] == summary["max_self_imaging_error"].get<double>());
  for (const char* f : {"sim_manifest.json", "sim_trajectory.csv", "sim_observables.csv", "sweep_sweep.csv",
                        "sweep_manifest.json"}) {
    fs::remove(f);
  }
}

TEST_CASE("F0/omega sweep: self-imaging minima at the Bessel zeros") {
  const fs::path dir = scratch("sweep");
  write(dir / "grid.ini",
        "[profile]\nsites = 80\n"
        "[drive]\nkind = sinusoidal\nomega_over_rho = 1\nF0_over_omega = 1\n"
        "[run]\nsteps_per_period = 1000\n"
        "[output]\ndirectory = " + (dir / "out").string() + "\n"
        "[sweep]\nparameter = F0_over_omega\nstart = 0\nstop = 8\npoints = 161\nthreads = 2\n");
  const cli::RunManifest m = cli::run_sweep(dir / "grid.ini");
  REQUIRE(m.outputs.size() == 1);
  const std::string csv = read(m.outputs[0]);
  const auto x = numbers(column(csv, "F0_over_omega"));
  const auto err = numbers(column(csv, "self_imaging_error"));
  const auto status = column(csv, "status");
  REQUIRE(x.size() == 161);
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < err.size(); ++i) {
    if (err[i] < err[i - 1] && err[i] < err[i + 1] && err[i] < 0.1) minima.push_back(x[i]);
  }
  const double step = 8.0 / 160;
  REQUIRE(minima.size() == 2);
  CHECK(std::abs(minima[0] - find_dl_amplitude(DriveFamily::Sinusoidal, 1.0, 1).ratio) <= step);
  CHECK(std::abs(minima[1] - find_dl_amplitude(DriveFamily::Sinusoidal, 1.0, 2).ratio) <= step);
  CHECK(m.summary["failed_points"] == 0);
}

TEST_CASE("omega/rho sweep at the localisation point") {
  const fs::path dir = scratch("omega");
  write(dir / "w.ini",
        "[profile]\nsites = 300\n"
        "[drive]\nkind = sinusoidal\nomega_over_rho = 1\nF0_over_omega = 2.404825557695773\n"
        "[run]\nsteps_per_period = 2000\n"
        "[output]\ndirectory = " + (dir / "out").string() + "\n"
        "[sweep]\nparameter = omega_over_rho\nstart = 0.2\nstop = 5\npoints = 9\n");
  const cli::RunManifest m = cli::run_sweep(dir / "w.ini");
  const std::string csv = read(m.outputs[0]);
  const auto err = numbers(column(csv, "self_imaging_error"));
  REQUIRE(err.size() == 9);
  for (double e : err) CHECK(e <= 1e-3);
}

TEST_CASE("sweep records per-point failures and continues") {
  const fs::path dir = scratch("fail");
  write(dir / "f.ini",
        "[profile]\nsites = 20\n"
        "[drive]\nkind = sinusoidal\nomega_over_rho = 1\nF0_over_omega = 1\n"
        "[run]\nsteps_per_period = 200\n"
        "[output]\ndirectory = " + (dir / "out").string() + "\n"
        "[sweep]\nparameter = omega_over_rho\nstart = 1\nstop = -1\npoints = 3\n");
  const cli::RunManifest m = cli::run_sweep(dir / "f.ini");
  const auto status = column(read(m.outputs[0]), "status");
  REQUIRE(status.size() == 3);
  CHECK(status[0] != "ok");
  CHECK(status[0].rfind("error", 0) != 0);
  CHECK(status[1].rfind("error", 0) == 0);
  CHECK(status[2].rfind("error", 0) == 0);
  CHECK(m.summary["failed_points"] == 2);
}

TEST_CASE("two-axis sweep in grid order") {
  const fs::path dir = scratch("grid2");
  write(dir / "g.ini",
        "[profile]\nsites = 20\n"
        "[drive]\nkind = square\nomega_over_rho = 1\nF0_over_omega = 1\n"
        "[run]\nsteps_per_period = 200\n"
        "[output]\ndirectory = " + (dir / "out").string() + "\n"
        "[sweep]\nparameter = F0_over_omega\nstart = 1\nstop = 2\npoints = 2\n"
        "parameter2 = omega_over_rho\nstart2 = 1\nstop2 = 3\npoints2 = 3\nthreads = 3\n");
  const cli::RunManifest m = cli::run_sweep(dir / "g.ini");
  const std::string csv = read(m.outputs[0]);
  CHECK(numbers(column(csv, "F0_over_omega")) == std::vector<double>{1, 1, 1, 2, 2, 2});
  CHECK(numbers(column(csv, "omega_over_rho")) == std::vector<double>{1, 2, 3, 1, 2, 3});
  std::string text = read(dir / "g.ini");
  text.replace(text.find("points = 2"), 10, "points = 400");
  text.replace(text.find("points2 = 3"), 11, "points2 = 400");
  write(dir / "big.ini", text);
  CHECK_THROWS_AS(cli::run_sweep(dir / "big.ini"), ConfigError);
}
