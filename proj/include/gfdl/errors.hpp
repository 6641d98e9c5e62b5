#pragma once

#include <stdexcept>
#include <string>

namespace gfdl {

/// Invalid configuration value. `field` names the offending key
/// (e.g. "drive.omega").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A root search that scanned its whole bracket without success.
class SearchError : public std::runtime_error {
 public:
  SearchError(const std::string& message, double lo, double hi)
      : std::runtime_error(message), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Initial state sits too close to the truncation edge for the exact
/// propagator.
class HeadroomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unitarity, norm or leakage outside tolerance.
class NumericalValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `row` is 1-based (header is row 1).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& message)
      : std::runtime_error("row " + std::to_string(row) + ": " + message), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace gfdl
