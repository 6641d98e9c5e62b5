#include "gfdl/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfdl {

const std::vector<double>& ObservableSeries::channel(const std::string& name) const {
  for (const auto& [key, values] : channels) {
    if (key == name) return values;
  }
  throw std::out_of_range("no observable channel '" + name + "'");
}

void ObservableSeries::add(std::string name, std::vector<double> values) {
  channels.emplace_back(std::move(name), std::move(values));
}

std::vector<double> revival_probability(const Trajectory& traj, Frame frame) {
  if (traj.states.empty()) throw std::invalid_argument("revival_probability: empty trajectory");
  const DriveWaveform& drive = traj.config.drive;
  const LatticeState first = to_frame(traj.states.front(), drive, frame);
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (const LatticeState& s : traj.states) {
    const LatticeState cur = to_frame(s, drive, frame);
    cplx overlap = 0.0;
    for (std::size_t n = 0; n < cur.amplitudes.size(); ++n) {
      overlap += std::conj(first.amplitudes[n]) * cur.amplitudes[n];
    }
    out.push_back(std::norm(overlap));
  }
  return out;
}

std::size_t nearest_sample(const Trajectory& traj, double t) {
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
  if (it == traj.times.begin()) return 0;
  if (it == traj.times.end()) return traj.times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - traj.times.begin());
  return (t - traj.times[hi - 1] <= *it - t) ? hi - 1 : hi;
}

SelfImagingResult self_imaging_error(const Trajectory& traj, int k) {
  if (traj.states.empty()) throw std::invalid_argument("self_imaging_error: empty trajectory");
  if (k < 0) throw std::invalid_argument("self_imaging_error: k must be >= 0");
  const double target = k * traj.config.drive.period();
  const double last = traj.times.back();
  const double slack = 0.5 * traj.config.dt * traj.config.record_stride;
  if (target > last + slack) {
    throw std::out_of_range("self_imaging_error: kT beyond the recorded trajectory");
  }
  const std::size_t idx = nearest_sample(traj, target);
  const auto& a0 = traj.states.front().amplitudes;
  const auto& a = traj.states[idx].amplitudes;
  SelfImagingResult r;
  r.sample_time = traj.times[idx];
  r.offset = r.sample_time - target;
  for (std::size_t n = 0; n < a.size(); ++n) r.error = std::max(r.error, std::abs(std::abs(a[n]) - std::abs(a0[n])));
  return r;
}

Moments moments(const Trajectory& traj) {
  if (traj.states.empty()) throw std::invalid_argument("moments: empty trajectory");
  Moments m;
  for (const LatticeState& s : traj.states) {
    double p = 0.0, first = 0.0, second = 0.0;
    for (std::size_t n = 0; n < s.amplitudes.size(); ++n) {
      const double w = std::norm(s.amplitudes[n]);
      const double nn = static_cast<double>(n);
      p += w;
      first += nn * w;
      second += nn * nn * w;
    }
    const double mean = first / p;
    m.mean.push_back(mean);
    m.spread.push_back(std::sqrt(std::max(0.0, second / p - mean * mean)));
  }
  return m;
}

ObservableSeries observables(const Trajectory& traj, Frame frame) {
  ObservableSeries series;
  series.times = traj.times;
  series.add("revival", revival_probability(traj, frame));
  series.add("norm", traj.norms);
  Moments m = moments(traj);
  series.add("mean_n", std::move(m.mean));
  series.add("spread_n", std::move(m.spread));
  std::vector<double> participation;
  std::vector<double> leakage;
  for (const LatticeState& s : traj.states) {
    double p2 = 0.0, p4 = 0.0;
    for (const cplx& a : s.amplitudes) {
      const double w = std::norm(a);
      p2 += w;
      p4 += w * w;
    }
    participation.push_back(p2 * p2 / p4);
    leakage.push_back(boundary_weight(s.amplitudes));
  }
  series.add("participation", std::move(participation));
  series.add("leakage", std::move(leakage));
  return series;
}

}  // namespace gfdl
