#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gfdl/propagate.hpp"

namespace gfdl {

/// Named channels on a trajectory's sample grid.
struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> channels;

  /// Throws std::out_of_range for an unknown channel.
  const std::vector<double>& channel(const std::string& name) const;
  void add(std::string name, std::vector<double> values);
};

/// P_r(t) = |<psi(0)|psi(t)>|^2 with both states taken in `frame`.
std::vector<double> revival_probability(const Trajectory& traj, Frame frame = Frame::Lab);

struct SelfImagingResult {
  double error = 0.0;        ///< max_n | |c_n(kT)| - |c_n(0)| |
  double sample_time = 0.0;  ///< time of the sample used
  double offset = 0.0;       ///< sample_time - kT
};

/// Uses the sample nearest to kT. Throws std::domain_error for non-periodic
/// drives and std::out_of_range when kT lies beyond the last sample.
SelfImagingResult self_imaging_error(const Trajectory& traj, int k);

/// Index of the sample nearest to t.
std::size_t nearest_sample(const Trajectory& traj, double t);

struct Moments {
  std::vector<double> mean;    ///< <n>
  std::vector<double> spread;  ///< sqrt(<n^2> - <n>^2)
};

Moments moments(const Trajectory& traj);

/// Channels: revival, norm, mean_n, spread_n, participation, leakage.
ObservableSeries observables(const Trajectory& traj, Frame frame = Frame::Lab);

}  // namespace gfdl
