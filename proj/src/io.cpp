#include "gfdl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gfdl/errors.hpp"

namespace gfdl::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Inline comments start with whitespace followed by '#' or ';'.
std::string strip_comment(const std::string& value) {
  for (std::size_t i = 1; i < value.size(); ++i) {
    if ((value[i] == '#' || value[i] == ';') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
      return trim(std::string_view(value).substr(0, i));
    }
  }
  return trim(value);
}

bool parse_real(std::string_view text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string field(const std::string& section, const std::string& key) { return section + "." + key; }

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

ConfigFile ConfigFile::parse(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  ConfigFile cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "key outside of any section");
    auto& dest = cfg.sections_[section];
    for (const auto& [key, value] : body) dest[key] = strip_comment(value.data());
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse(in);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

bool ConfigFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

const std::string& ConfigFile::raw(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) throw ConfigError(field(section, key), "missing (no [" + section + "] section)");
  const auto k = s->second.find(key);
  if (k == s->second.end()) throw ConfigError(field(section, key), "missing");
  used_[field(section, key)] = true;
  return k->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? raw(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const std::string& text = raw(section, key);
  double v = 0.0;
  if (!parse_real(text, v) || !std::isfinite(v)) {
    throw ConfigError(field(section, key), "expected a finite number, got '" + text + "'");
  }
  return v;
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
  const std::string text = trim(raw(section, key));
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(field(section, key), "expected an integer, got '" + text + "'");
  }
  return v;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& text = raw(section, key);
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError(field(section, key), "expected true/false, got '" + text + "'");
}

std::vector<double> ConfigFile::get_doubles(const std::string& section, const std::string& key) const {
  const std::string& text = raw(section, key);
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    double v = 0.0;
    if (!parse_real(part, v) || !std::isfinite(v)) {
      throw ConfigError(field(section, key), "entry " + std::to_string(out.size()) + " is not a number: '" + part + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<cplx> ConfigFile::get_complexes(const std::string& section, const std::string& key) const {
  const std::string& text = raw(section, key);
  std::vector<cplx> out;
  for (const std::string& part : split(text, ',')) {
    const auto colon = part.find(':');
    double re = 0.0, im = 0.0;
    const bool ok = colon == std::string::npos
                        ? parse_real(part, re)
                        : parse_real(std::string_view(part).substr(0, colon), re) &&
                              parse_real(std::string_view(part).substr(colon + 1), im);
    if (!ok || !std::isfinite(re) || !std::isfinite(im)) {
      throw ConfigError(field(section, key), "entry " + std::to_string(out.size()) + " is not re:im: '" + part + "'");
    }
    out.emplace_back(re, im);
  }
  return out;
}

void ConfigFile::check_unused() const {
  for (const auto& [section, body] : sections_) {
    for (const auto& entry : body) {
      const std::string name = field(section, entry.first);
      if (!used_.count(name)) throw ConfigError(name, "unknown key");
    }
  }
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,n,re,im,abs2\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const std::string t = format_double(traj.times[i]);
    const auto& a = traj.states[i].amplitudes;
    for (std::size_t n = 0; n < a.size(); ++n) {
      out << t << ',' << n << ',' << format_double(a[n].real()) << ',' << format_double(a[n].imag()) << ','
          << format_double(std::norm(a[n])) << '\n';
    }
  }
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
  TrajectoryTable table;
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++row;
  if (trim(line) != "t,n,re,im,abs2") throw ParseError(row, "expected header 't,n,re,im,abs2'");

  double current_t = 0.0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cols = split(line, ',');
    if (cols.size() != 5) {
      throw ParseError(row, "expected 5 columns, found " + std::to_string(cols.size()));
    }
    double t = 0.0, re = 0.0, im = 0.0, abs2 = 0.0;
    int n = 0;
    const auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), n);
    const bool n_ok = !cols[1].empty() && ec == std::errc() && ptr == cols[1].data() + cols[1].size();
    if (!parse_real(cols[0], t) || !n_ok || !parse_real(cols[2], re) || !parse_real(cols[3], im) ||
        !parse_real(cols[4], abs2)) {
      throw ParseError(row, "malformed number");
    }
    if (n == 0) {
      if (!table.times.empty() && !(t >= current_t)) throw ParseError(row, "time is not non-decreasing");
      table.times.push_back(t);
      table.amplitudes.emplace_back();
      current_t = t;
    } else if (table.times.empty() || t != current_t ||
               static_cast<std::size_t>(n) != table.amplitudes.back().size()) {
      throw ParseError(row, "site index out of sequence");
    }
    table.amplitudes.back().emplace_back(re, im);
  }
  if (table.times.empty()) throw ParseError(row, "no data rows");
  const std::size_t sites = table.amplitudes.front().size();
  for (std::size_t i = 1; i < table.amplitudes.size(); ++i) {
    if (table.amplitudes[i].size() != sites) {
      throw ParseError(row, "sample " + std::to_string(i) + " has a different site count");
    }
  }
  return table;
}

void write_observables_csv(std::ostream& out, const ObservableSeries& series) {
  out << 't';
  for (const auto& [name, values] : series.channels) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << format_double(series.times[i]);
    for (const auto& channel : series.channels) out << ',' << format_double(channel.second[i]);
    out << '\n';
  }
}

void write_quasienergy_csv(std::ostream& out, const QuasienergySpectrum& spectrum) {
  out << "index,value,converged\n";
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    const bool ok = i < spectrum.converged.size() && spectrum.converged[i];
    out << i << ',' << format_double(spectrum.values[i]) << ',' << (ok ? 1 : 0) << '\n';
  }
}

void write_stark_csv(std::ostream& out, const StarkLadder& ladder) {
  out << "index,value,converged,spacing\n";
  for (std::size_t i = 0; i < ladder.values.size(); ++i) {
    out << i << ',' << format_double(ladder.values[i]) << ',' << (ladder.converged[i] ? 1 : 0) << ',';
    if (i < ladder.spacing.size()) out << format_double(ladder.spacing[i]);
    out << '\n';
  }
}

}  // namespace gfdl::io
