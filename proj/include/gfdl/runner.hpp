#pragma once

// Run orchestration behind the command-line tool.
//
// Config sections (INI):
//   [profile]  kind = glauber_fock | uniform | custom, rho, rho_imag, sites, table
//   [drive]    kind = none | dc | sinusoidal | square | sampled,
//              omega | omega_over_rho, F0 | F0_over_omega | F0_over_rho | dl_root,
//              samples, t0
//   [run]      initial_site | initial_amplitudes, dt | steps_per_period,
//              t_end | periods, record_stride, frame, integrator,
//              exact_oracle, fail_on_leakage
//   [output]   directory, prefix, trajectory
//   [sweep]    parameter, start, stop, points, [parameter2, start2, stop2, points2],
//              periods, threads, quasienergy_spread
//   [spectra]  mode = monodromy | stark, steps_per_period, F0 | F0_over_rho

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfdl/io.hpp"
#include "gfdl/model.hpp"

namespace gfdl::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Norm drift beyond this marks a run as numerically invalid.
constexpr double kNormTolerance = 1e-9;

struct RunManifest {
  std::string command;
  nlohmann::json config;  ///< echo of every section and key
  std::string version = kVersion;
  double duration_seconds = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
  nlohmann::json summary = nlohmann::json::object();
  /// 0, or 2 when a validity check failed after outputs were written.
  int exit_code = 0;

  nlohmann::json to_json() const;
};

/// Profile, drive and [run] keys turned into a validated simulation.
SimulationConfig load_simulation(const io::ConfigFile& config);

/// Scalars reported per sweep point and in the simulate summary.
struct PointScalars {
  double revival_T = 0.0;                ///< P_r(T)
  double self_imaging_error = 0.0;       ///< at k = 1
  double min_revival = 0.0;              ///< min over k = 1..periods
  double max_self_imaging_error = 0.0;   ///< max over k = 1..periods
  double quasienergy_spread = std::nan("");
  double max_leakage = 0.0;
};

/// Evolves `periods` periods (t_end and record_stride are overridden).
PointScalars evaluate_point(SimulationConfig sim, int periods, bool spread);

RunManifest run_simulate(const std::filesystem::path& config_path);
RunManifest run_sweep(const std::filesystem::path& config_path);
RunManifest run_spectra(const std::filesystem::path& config_path);

/// First `count` localisation amplitudes of a drive family.
std::vector<DlRoot> dl_roots(DriveFamily family, double omega, int count);

/// Reads a trajectory CSV and writes an SVG heat map. Throws ParseError.
void emit_heatmap(const std::filesystem::path& csv, const std::filesystem::path& image);

}  // namespace gfdl::cli
