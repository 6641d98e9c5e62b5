#include "gfdl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "gfdl/errors.hpp"
#include "quadrature.hpp"

namespace gfdl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Splits s = k*period + u with u in [0, period).
std::pair<double, double> reduce(double s, double period) {
  const double k = std::floor(s / period);
  double u = s - k * period;
  if (u < 0.0) u = 0.0;
  if (u >= period) u = std::nextafter(period, 0.0);
  return {k, u};
}

}  // namespace

// ---------------------------------------------------------------------------
// HoppingProfile

HoppingProfile::HoppingProfile(ProfileKind kind, cplx rho, std::vector<double> table, int sites)
    : kind_(kind), rho_(rho), table_(std::move(table)), sites_(sites) {
  if (sites_ < 0) throw ConfigError("profile.sites", "truncation N must be >= 0");
  if (!std::isfinite(rho_.real()) || !std::isfinite(rho_.imag())) {
    throw ConfigError("profile.rho", "must be finite");
  }
  if (kind_ == ProfileKind::Custom) {
    if (static_cast<int>(table_.size()) < sites_) {
      throw ConfigError("profile.table", "needs at least N = " + std::to_string(sites_) +
                                             " entries, got " + std::to_string(table_.size()));
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (!std::isfinite(table_[i]) || table_[i] < 0.0) {
        throw ConfigError("profile.table",
                          "entry " + std::to_string(i + 1) + " must be finite and nonnegative");
      }
    }
  }
}

HoppingProfile HoppingProfile::uniform(cplx rho, int sites) {
  return {ProfileKind::Uniform, rho, {}, sites};
}

HoppingProfile HoppingProfile::glauber_fock(cplx rho, int sites) {
  return {ProfileKind::GlauberFock, rho, {}, sites};
}

HoppingProfile HoppingProfile::custom(cplx rho, std::vector<double> table, int sites) {
  return {ProfileKind::Custom, rho, std::move(table), sites};
}

HoppingProfile HoppingProfile::with_truncation(int sites) const {
  return {kind_, rho_, table_, sites};
}

double HoppingProfile::hopping(int n) const {
  if (n < 0 || n > sites_) {
    throw std::out_of_range("hopping: site " + std::to_string(n) + " outside 0.." +
                            std::to_string(sites_));
  }
  if (n == 0) return 0.0;
  const double scale = std::abs(rho_);
  switch (kind_) {
    case ProfileKind::Uniform:
      return scale;
    case ProfileKind::GlauberFock:
      return scale * std::sqrt(static_cast<double>(n));
    case ProfileKind::Custom:
      return scale * table_[static_cast<std::size_t>(n - 1)];
  }
  return 0.0;
}

cplx HoppingProfile::coupling(int n) const {
  const double scale = std::abs(rho_);
  if (scale == 0.0) return 0.0;
  return hopping(n) * (rho_ / scale);
}

double hopping(const HoppingProfile& profile, int n) { return profile.hopping(n); }

// ---------------------------------------------------------------------------
// DriveWaveform

DriveWaveform::DriveWaveform(DriveKind kind, double f0, double omega, double t0,
                             std::vector<double> samples)
    : kind_(kind), f0_(f0), omega_(omega), t0_(t0), samples_(std::move(samples)) {
  if (!std::isfinite(f0_)) throw ConfigError("drive.F0", "must be finite");
  if (!std::isfinite(t0_)) throw ConfigError("drive.t0", "must be finite");
  if (periodic() && !(omega_ > 0.0 && std::isfinite(omega_))) {
    throw ConfigError("drive.omega", "periodic drives need a finite omega > 0");
  }
  if (kind_ == DriveKind::Sampled) {
    if (samples_.size() < 2) throw ConfigError("drive.samples", "need at least 2 samples");
    for (double v : samples_) {
      if (!std::isfinite(v)) throw ConfigError("drive.samples", "entries must be finite");
    }
    // Trapezoid is exact for a piecewise-linear force.
    const double step = period() / static_cast<double>(samples_.size());
    cumulative_.assign(samples_.size() + 1, 0.0);
    for (std::size_t j = 0; j < samples_.size(); ++j) {
      const double next = samples_[(j + 1) % samples_.size()];
      cumulative_[j + 1] = cumulative_[j] + 0.5 * step * (samples_[j] + next);
    }
  }
}

DriveWaveform DriveWaveform::none() { return {DriveKind::None, 0.0, 0.0, 0.0, {}}; }
DriveWaveform DriveWaveform::dc(double f0) { return {DriveKind::Dc, f0, 0.0, 0.0, {}}; }
DriveWaveform DriveWaveform::sinusoidal(double f0, double omega, double t0) {
  return {DriveKind::Sinusoidal, f0, omega, t0, {}};
}
DriveWaveform DriveWaveform::square(double f0, double omega, double t0) {
  return {DriveKind::Square, f0, omega, t0, {}};
}
DriveWaveform DriveWaveform::sampled(std::vector<double> samples, double omega, double t0) {
  return {DriveKind::Sampled, 0.0, omega, t0, std::move(samples)};
}

DriveWaveform DriveWaveform::shifted(double t0) const {
  return {kind_, f0_, omega_, t0, samples_};
}

bool DriveWaveform::periodic() const {
  return kind_ == DriveKind::Sinusoidal || kind_ == DriveKind::Square ||
         kind_ == DriveKind::Sampled;
}

double DriveWaveform::period() const {
  if (!periodic()) throw std::domain_error("drive has no period");
  return kTwoPi / omega_;
}

double DriveWaveform::time_scale() const {
  if (periodic()) return period();
  if (kind_ == DriveKind::Dc && f0_ != 0.0) return kTwoPi / std::abs(f0_);
  return std::numeric_limits<double>::infinity();
}

double DriveWaveform::base_force(double s) const {
  switch (kind_) {
    case DriveKind::None:
      return 0.0;
    case DriveKind::Dc:
      return f0_;
    case DriveKind::Sinusoidal:
      return f0_ * std::cos(omega_ * s);
    case DriveKind::Square: {
      const double T = period();
      const double u = reduce(s, T).second;
      return u < 0.5 * T ? f0_ : -f0_;
    }
    case DriveKind::Sampled: {
      const double T = period();
      const std::size_t m = samples_.size();
      const double step = T / static_cast<double>(m);
      const double u = reduce(s, T).second;
      const auto j = std::min<std::size_t>(static_cast<std::size_t>(u / step), m - 1);
      const double w = (u - static_cast<double>(j) * step) / step;
      return (1.0 - w) * samples_[j] + w * samples_[(j + 1) % m];
    }
  }
  return 0.0;
}

double DriveWaveform::base_antiderivative(double s) const {
  switch (kind_) {
    case DriveKind::None:
      return 0.0;
    case DriveKind::Dc:
      return f0_ * s;
    case DriveKind::Sinusoidal:
      return f0_ / omega_ * std::sin(omega_ * s);
    case DriveKind::Square: {
      // Zero mean: the antiderivative is itself periodic.
      const double T = period();
      const double u = reduce(s, T).second;
      return u < 0.5 * T ? f0_ * u : f0_ * (T - u);
    }
    case DriveKind::Sampled: {
      const double T = period();
      const std::size_t m = samples_.size();
      const double step = T / static_cast<double>(m);
      const auto [k, u] = reduce(s, T);
      const auto j = std::min<std::size_t>(static_cast<std::size_t>(u / step), m - 1);
      const double w = u - static_cast<double>(j) * step;
      const double fa = samples_[j];
      const double fb = samples_[(j + 1) % m];
      const double local = cumulative_[j] + fa * w + 0.5 * (fb - fa) * w * w / step;
      return k * cumulative_[m] + local;
    }
  }
  return 0.0;
}

double DriveWaveform::force(double t) const { return base_force(t + t0_); }

double DriveWaveform::phase(double t) const {
  if (kind_ == DriveKind::None) return 0.0;
  if (kind_ == DriveKind::Dc) return f0_ * t;
  return base_antiderivative(t + t0_) - base_antiderivative(t0_);
}

std::vector<double> DriveWaveform::breakpoints(double a, double b) const {
  std::vector<double> out;
  double spacing = 0.0;
  if (kind_ == DriveKind::Square) spacing = 0.5 * period();
  if (kind_ == DriveKind::Sampled) spacing = period() / static_cast<double>(samples_.size());
  if (spacing <= 0.0 || b <= a) return out;
  for (double j = std::floor((a + t0_) / spacing); ; j += 1.0) {
    const double t = j * spacing - t0_;
    if (t >= b) break;
    if (t > a) out.push_back(t);
  }
  return out;
}

double phase_integral(const DriveWaveform& drive, double t) {
  if (t < 0.0) throw std::domain_error("phase_integral: t must be >= 0");
  return drive.phase(t);
}

cplx sigma(const DriveWaveform& drive, cplx rho, double t) {
  if (t < 0.0) throw std::domain_error("sigma: t must be >= 0");
  return rho * detail::integrate_exp_phase(drive, 0.0, t);
}

cplx dl_residual(const DriveWaveform& drive, double period) {
  if (!(period > 0.0)) throw std::domain_error("dl_residual: period must be > 0");
  if (drive.kind() == DriveKind::None) return period;
  if (!drive.periodic()) throw std::domain_error("dl_residual: drive is not periodic");
  if (std::abs(period - drive.period()) > 1e-9 * drive.period()) {
    throw std::domain_error("dl_residual: T does not match the drive period");
  }
  return detail::integrate_exp_phase(drive, 0.0, period);
}

// ---------------------------------------------------------------------------
// Localisation roots

DriveWaveform family_drive(DriveFamily family, double f0, double omega) {
  switch (family) {
    case DriveFamily::Sinusoidal:
      return DriveWaveform::sinusoidal(f0, omega);
    case DriveFamily::Square:
      return DriveWaveform::square(f0, omega);
  }
  throw std::invalid_argument("unknown drive family");
}

constexpr double kScanPanels = 256.0;

DlRoot find_dl_amplitude(DriveFamily family, double omega, int k, const DlSearchOptions& options) {
  if (k < 1) throw std::invalid_argument("find_dl_amplitude: root index must be >= 1");
  if (!(omega > 0.0)) throw std::invalid_argument("find_dl_amplitude: omega must be > 0");

  // The residual over T depends on F0/omega only. Search in that ratio at
  // unit frequency; the returned F0 is an exact multiple of omega.
  auto normalized = [family](double ratio) {
    return dl_residual(family_drive(family, ratio, 1.0), kTwoPi) / kTwoPi;
  };
  // Fixed-panel estimate, only used to bracket sign changes.
  auto rough = [family](double ratio) {
    const DriveWaveform d = family_drive(family, ratio, 1.0);
    const std::vector<double> grid = detail::panel_grid(d, 0.0, kTwoPi, kTwoPi / kScanPanels);
    cplx sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) sum += detail::panel_integral(d, grid[i - 1], grid[i]);
    return sum.real() / kTwoPi;
  };
  auto re = [&](double ratio) { return normalized(ratio).real(); };

  int found = 0;
  double lo = 0.0;
  double re_lo = rough(lo);
  const auto steps = static_cast<long>(std::ceil(options.ratio_max / options.ratio_step));
  for (long i = 1; i <= steps; ++i) {
    const double hi = std::min(options.ratio_max, static_cast<double>(i) * options.ratio_step);
    const double re_hi = rough(hi);
    if (re_lo * re_hi <= 0.0 && re_lo != 0.0) {
      const double fa = re(lo);
      const double fb = re(hi);
      double ratio = fb == 0.0 ? hi : lo;
      if (fa * fb < 0.0) {
        std::uintmax_t iterations = 100;
        const auto bracket = boost::math::tools::toms748_solve(re, lo, hi, fa, fb,
                                                               boost::math::tools::eps_tolerance<double>(52), iterations);
        ratio = std::abs(re(bracket.first)) <= std::abs(re(bracket.second)) ? bracket.first : bracket.second;
      }
      const double residual = std::abs(normalized(ratio));
      if (residual <= options.accept_tolerance) {
        if (++found == k) return {k, ratio * omega, ratio, residual};
      }
    }
    lo = hi;
    re_lo = re_hi;
  }
  throw SearchError("find_dl_amplitude: root " + std::to_string(k) + " not found in F0/omega in [0, " +
                        std::to_string(options.ratio_max) + "]",
                    0.0, options.ratio_max * omega);
}

// ---------------------------------------------------------------------------
// States and gauge

std::string_view to_string(Frame frame) { return frame == Frame::Lab ? "lab" : "gauge"; }

double LatticeState::norm_squared() const {
  double s = 0.0;
  for (const cplx& a : amplitudes) s += std::norm(a);
  return s;
}

LatticeState gauge_transform(const LatticeState& state, const DriveWaveform& drive,
                             GaugeDirection direction) {
  const Frame from = direction == GaugeDirection::LabToGauge ? Frame::Lab : Frame::Gauge;
  if (state.frame != from) {
    throw std::invalid_argument("gauge_transform: state is in the " +
                                std::string(to_string(state.frame)) + " frame");
  }
  LatticeState out = state;
  out.frame = direction == GaugeDirection::LabToGauge ? Frame::Gauge : Frame::Lab;
  const double phi = drive.phase(state.time);
  if (phi == 0.0) return out;
  const double sign = direction == GaugeDirection::LabToGauge ? 1.0 : -1.0;
  for (std::size_t n = 1; n < out.amplitudes.size(); ++n) {
    out.amplitudes[n] *= std::polar(1.0, sign * static_cast<double>(n) * phi);
  }
  return out;
}

LatticeState to_frame(const LatticeState& state, const DriveWaveform& drive, Frame target) {
  if (state.frame == target) return state;
  return gauge_transform(state, drive,
                         target == Frame::Gauge ? GaugeDirection::LabToGauge
                                                : GaugeDirection::GaugeToLab);
}

// ---------------------------------------------------------------------------
// SimulationConfig

void SimulationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("run.dt", "must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("run.t_end", "must be >= 0");
  if (record_stride < 1) throw ConfigError("run.record_stride", "must be >= 1");
  const int N = profile.truncation();
  if (const int* site = std::get_if<int>(&initial)) {
    if (*site < 0 || *site > N) {
      throw ConfigError("run.initial_site",
                        "site " + std::to_string(*site) + " outside 0.." + std::to_string(N));
    }
  } else {
    const auto& v = std::get<std::vector<cplx>>(initial);
    if (v.empty() || static_cast<int>(v.size()) > N + 1) {
      throw ConfigError("run.initial_amplitudes",
                        "needs 1.." + std::to_string(N + 1) + " entries, got " + std::to_string(v.size()));
    }
    double s = 0.0;
    for (const cplx& a : v) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw ConfigError("run.initial_amplitudes", "entries must be finite");
      }
      s += std::norm(a);
    }
    if (!(s > 0.0)) throw ConfigError("run.initial_amplitudes", "vector has zero norm");
  }
}

LatticeState SimulationConfig::initial_state() const {
  validate();
  LatticeState state;
  state.frame = frame;
  state.amplitudes.assign(static_cast<std::size_t>(profile.size()), 0.0);
  if (const int* site = std::get_if<int>(&initial)) {
    state.amplitudes[static_cast<std::size_t>(*site)] = 1.0;
  } else {
    const auto& v = std::get<std::vector<cplx>>(initial);
    std::copy(v.begin(), v.end(), state.amplitudes.begin());
    const double scale = 1.0 / std::sqrt(state.norm_squared());
    for (cplx& a : state.amplitudes) a *= scale;
  }
  return state;
}

}  // namespace gfdl
