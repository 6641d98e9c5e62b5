#pragma once

// File formats: INI-style run configuration, CSV outputs.
//
// Trajectory CSV:  t,n,re,im,abs2            (one row per sample and site)
// Observable CSV:  t,<channel>...
// Spectrum CSV:    index,value,converged[,spacing]
//
// Reals are written with 17 significant digits; re-parsing restores the
// stored doubles exactly.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfdl/observables.hpp"
#include "gfdl/spectra.hpp"

namespace gfdl::io {

std::string format_double(double value);

// ---------------------------------------------------------------------------
// Configuration

/// Parsed key-value sections. Every accessor records the key as consumed;
/// `check_unused` rejects typos and keys that do not belong to a section.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  /// Entries "re:im" or "re".
  std::vector<cplx> get_complexes(const std::string& section, const std::string& key) const;

  /// Throws ConfigError for any key that no accessor has read.
  void check_unused() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  const std::string& raw(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::map<std::string, bool> used_;
};

// ---------------------------------------------------------------------------
// CSV

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct TrajectoryTable {
  std::vector<double> times;
  std::vector<std::vector<cplx>> amplitudes;  ///< one vector per time, sites 0..N
};

/// Throws ParseError with the offending row for malformed input.
TrajectoryTable read_trajectory_csv(std::istream& in);

/// Optional extra channels (e.g. an oracle deviation) are appended after the
/// series' own channels.
void write_observables_csv(std::ostream& out, const ObservableSeries& series);

void write_quasienergy_csv(std::ostream& out, const QuasienergySpectrum& spectrum);
void write_stark_csv(std::ostream& out, const StarkLadder& ladder);

}  // namespace gfdl::io
