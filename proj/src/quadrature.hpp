#pragma once

// Composite Gauss-Legendre panels for integrals of exp(-i Phi(t)).

#include <array>
#include <span>
#include <vector>

#include "gfdl/model.hpp"

namespace gfdl::detail {

constexpr int kGaussPoints = 8;
constexpr int kPanelsPerPeriod = 4096;
constexpr double kRefineTolerance = 1e-12;
constexpr int kMaxRefinements = 6;

struct GaussRule {
  std::array<double, kGaussPoints> nodes;    // on [-1, 1], ascending
  std::array<double, kGaussPoints> weights;
};

const GaussRule& gauss_rule();

/// Sorted times from a to b: endpoints, drive kinks, the `marks` inside
/// (a, b), and enough subdivisions that no panel exceeds `max_width`.
std::vector<double> panel_grid(const DriveWaveform& drive, double a, double b, double max_width,
                               std::span<const double> marks = {});

/// Initial panel width: time_scale / 4096.
double base_panel_width(const DriveWaveform& drive, double span);

/// exp(-i Phi(t)).
inline cplx unit_phasor(const DriveWaveform& drive, double t) {
  const double p = drive.phase(t);
  return {std::cos(p), -std::sin(p)};
}

/// Gauss-Legendre estimate of integral_a^b exp(-i Phi) on one panel.
cplx panel_integral(const DriveWaveform& drive, double a, double b);

/// integral_a^b exp(-i Phi(t)) dt, refined by halving panels until two
/// successive estimates agree to kRefineTolerance * (1 + |I|).
cplx integrate_exp_phase(const DriveWaveform& drive, double a, double b);

}  // namespace gfdl::detail
