#include "gfdl/propagate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gfdl/special.hpp"

namespace gfdl {

// ---------------------------------------------------------------------------
// TridiagonalAction

bool TridiagonalAction::hermitian() const {
  if (super.size() != sub.size()) return false;
  if (!diagonal.empty() && super.size() + 1 != diagonal.size()) return false;
  for (std::size_t i = 0; i < super.size(); ++i) {
    if (sub[i] != std::conj(super[i])) return false;
  }
  return true;
}

void TridiagonalAction::apply(const cplx* x, cplx* y) const {
  const std::size_t n = diagonal.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = diagonal[i] * x[i];
    if (i + 1 < n) acc += super[i] * x[i + 1];
    if (i > 0) acc += sub[i - 1] * x[i - 1];
    y[i] = acc;
  }
}

TridiagonalAction build_action(const HoppingProfile& profile, const DriveWaveform& drive, Frame frame,
                               double t) {
  if (t < 0.0) throw std::domain_error("build_action: t must be >= 0");
  const int size = profile.size();
  TridiagonalAction h;
  h.diagonal.assign(static_cast<std::size_t>(size), 0.0);
  h.super.resize(static_cast<std::size_t>(size - 1));
  h.sub.resize(static_cast<std::size_t>(size - 1));

  cplx rotation = 1.0;
  if (frame == Frame::Lab) {
    const double f = drive.force(t);
    for (int n = 0; n < size; ++n) h.diagonal[static_cast<std::size_t>(n)] = n * f;
  } else {
    rotation = std::polar(1.0, -drive.phase(t));
  }
  for (int n = 0; n + 1 < size; ++n) {
    const cplx c = -profile.coupling(n + 1) * rotation;
    h.super[static_cast<std::size_t>(n)] = c;
    h.sub[static_cast<std::size_t>(n)] = std::conj(c);
  }
  assert(h.hermitian());
  return h;
}

// ---------------------------------------------------------------------------
// Cayley step

LatticeState step(const LatticeState& state, const TridiagonalAction& action, double dt) {
  const std::size_t n = state.amplitudes.size();
  if (static_cast<std::size_t>(action.size()) != n) {
    throw std::invalid_argument("step: generator and state sizes differ");
  }
  const cplx ia(0.0, 0.5 * dt);

  // rhs = (I - i dt/2 H) psi
  std::vector<cplx> rhs(n);
  action.apply(state.amplitudes.data(), rhs.data());
  for (std::size_t i = 0; i < n; ++i) rhs[i] = state.amplitudes[i] - ia * rhs[i];

  // Thomas solve of (I + i dt/2 H) x = rhs.
  std::vector<cplx> c_prime(n);
  std::vector<cplx> d_prime(n);
  cplx pivot = 1.0 + ia * action.diagonal[0];
  assert(std::abs(pivot) > 0.0);
  c_prime[0] = n > 1 ? ia * action.super[0] / pivot : 0.0;
  d_prime[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    const cplx lower = ia * action.sub[i - 1];
    pivot = 1.0 + ia * action.diagonal[i] - lower * c_prime[i - 1];
    assert(std::abs(pivot) > 0.0);
    c_prime[i] = i + 1 < n ? ia * action.super[i] / pivot : 0.0;
    d_prime[i] = (rhs[i] - lower * d_prime[i - 1]) / pivot;
  }
  LatticeState out;
  out.frame = state.frame;
  out.time = state.time + dt;
  out.amplitudes.resize(n);
  out.amplitudes[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) out.amplitudes[i] = d_prime[i] - c_prime[i] * out.amplitudes[i + 1];
  return out;
}

// ---------------------------------------------------------------------------
// Chebyshev exponential

ChebyshevExponential::ChebyshevExponential(TridiagonalAction generator, double tau)
    : scaled_(std::move(generator)) {
  const std::size_t n = scaled_.diagonal.size();
  // Gershgorin interval [lo, hi].
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i + 1 < n) radius += std::abs(scaled_.super[i]);
    if (i > 0) radius += std::abs(scaled_.sub[i - 1]);
    lo = std::min(lo, scaled_.diagonal[i] - radius);
    hi = std::max(hi, scaled_.diagonal[i] + radius);
  }
  const double center = 0.5 * (hi + lo);
  const double half_width = 0.5 * (hi - lo);
  shift_phase_ = std::polar(1.0, -tau * center);
  if (half_width == 0.0) {
    coefficients_ = {1.0};
    for (double& d : scaled_.diagonal) d = 0.0;
    return;
  }
  for (double& d : scaled_.diagonal) d = (d - center) / half_width;
  for (cplx& s : scaled_.super) s /= half_width;
  for (cplx& s : scaled_.sub) s /= half_width;

  const double z = std::abs(tau) * half_width;
  const double sign = tau < 0.0 ? -1.0 : 1.0;
  const cplx minus_i(0.0, -sign);
  cplx power = 1.0;
  for (int k = 0; k < 100000; ++k) {
    const double jk = special::bessel_j(k, z);
    coefficients_.push_back((k == 0 ? 1.0 : 2.0) * power * jk);
    power *= minus_i;
    if (k > z && std::abs(jk) < 1e-18) break;
  }
}

void ChebyshevExponential::apply(cplx* v) const {
  const std::size_t n = scaled_.diagonal.size();
  if (coefficients_.size() == 1) {
    const cplx f = shift_phase_ * coefficients_[0];
    for (std::size_t i = 0; i < n; ++i) v[i] *= f;
    return;
  }
  std::vector<cplx> prev(v, v + n);  // T_0 v
  std::vector<cplx> cur(n);          // T_1 v
  std::vector<cplx> next(n);
  scaled_.apply(prev.data(), cur.data());
  std::vector<cplx> acc(n);
  for (std::size_t i = 0; i < n; ++i) acc[i] = coefficients_[0] * prev[i] + coefficients_[1] * cur[i];
  for (std::size_t k = 2; k < coefficients_.size(); ++k) {
    scaled_.apply(cur.data(), next.data());
    const cplx c = coefficients_[k];
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 2.0 * next[i] - prev[i];
      acc[i] += c * next[i];
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = shift_phase_ * acc[i];
}

// ---------------------------------------------------------------------------
// Split step

namespace {

TridiagonalAction hopping_generator(const HoppingProfile& profile) {
  return build_action(profile, DriveWaveform::none(), Frame::Lab, 0.0);
}

}  // namespace

SplitStepPropagator::SplitStepPropagator(const HoppingProfile& profile, const DriveWaveform& drive,
                                         Frame frame, double dt)
    : drive_(drive),
      frame_(frame),
      dt_(dt),
      size_(profile.size()),
      half_hop_(hopping_generator(profile), 0.5 * dt) {}

std::vector<cplx> SplitStepPropagator::phase_factors(double theta) const {
  std::vector<cplx> p(static_cast<std::size_t>(size_));
  const cplx base = std::polar(1.0, -theta);
  for (int n = 0; n < size_; ++n) {
    p[static_cast<std::size_t>(n)] = (n % 32 == 0) ? std::polar(1.0, -theta * n) : p[static_cast<std::size_t>(n - 1)] * base;
  }
  return p;
}

std::array<double, 3> SplitStepPropagator::phase_steps(double t) const {
  const double t1 = t + kNode * dt_;
  const double t2 = t + (1.0 - kNode) * dt_;
  const double phi1 = drive_.phase(t1);
  const double phi2 = drive_.phase(t2);
  if (frame_ == Frame::Lab) {
    return {phi1 - drive_.phase(t), phi2 - phi1, drive_.phase(t + dt_) - phi2};
  }
  // exp(-i dt/2 V(t2) K V(t2)^+) exp(-i dt/2 V(t1) K V(t1)^+), V = exp(i Phi n)
  return {phi1, phi2 - phi1, -phi2};
}

void SplitStepPropagator::advance_column(cplx* v, const std::vector<cplx>& p0, const std::vector<cplx>& p1,
                                         const std::vector<cplx>& p2) const {
  const auto n = static_cast<std::size_t>(size_);
  for (std::size_t i = 0; i < n; ++i) v[i] *= p0[i];
  half_hop_.apply(v);
  for (std::size_t i = 0; i < n; ++i) v[i] *= p1[i];
  half_hop_.apply(v);
  for (std::size_t i = 0; i < n; ++i) v[i] *= p2[i];
}

void SplitStepPropagator::advance(std::vector<cplx>& amplitudes, double t) const {
  if (static_cast<int>(amplitudes.size()) != size_) {
    throw std::invalid_argument("SplitStepPropagator: state size mismatch");
  }
  const auto theta = phase_steps(t);
  advance_column(amplitudes.data(), phase_factors(theta[0]), phase_factors(theta[1]),
                 phase_factors(theta[2]));
}

void SplitStepPropagator::advance(Eigen::MatrixXcd& columns, double t) const {
  if (columns.rows() != size_) throw std::invalid_argument("SplitStepPropagator: row count mismatch");
  const auto theta = phase_steps(t);
  const auto p0 = phase_factors(theta[0]);
  const auto p1 = phase_factors(theta[1]);
  const auto p2 = phase_factors(theta[2]);
  for (Eigen::Index c = 0; c < columns.cols(); ++c) advance_column(columns.col(c).data(), p0, p1, p2);
}

// ---------------------------------------------------------------------------
// evolve

double boundary_weight(const std::vector<cplx>& amplitudes) {
  const std::size_t n = amplitudes.size();
  const std::size_t first = n > kLeakageSites ? n - kLeakageSites : 0;
  double w = 0.0;
  for (std::size_t i = first; i < n; ++i) w += std::norm(amplitudes[i]);
  return w;
}

Trajectory evolve(const SimulationConfig& config) {
  Trajectory traj;
  traj.config = config;
  LatticeState state = config.initial_state();

  bool warned = false;
  auto record = [&](const LatticeState& s) {
    traj.times.push_back(s.time);
    traj.states.push_back(s);
    traj.norms.push_back(std::sqrt(s.norm_squared()));
    const double leak = boundary_weight(s.amplitudes);
    traj.max_leakage = std::max(traj.max_leakage, leak);
    if (leak > kLeakageThreshold && !warned) {
      std::ostringstream msg;
      msg << "boundary leakage " << leak << " on the top " << kLeakageSites << " sites at t = " << s.time
          << " (truncation N = " << config.profile.truncation() << " no longer faithful)";
      traj.warnings.push_back(msg.str());
      warned = true;
    }
  };
  record(state);

  const long long steps = std::llround(config.t_end / config.dt);
  if (steps == 0) return traj;

  const double dt = config.dt;
  if (config.integrator == Integrator::Split) {
    const SplitStepPropagator propagator(config.profile, config.drive, config.frame, dt);
    for (long long s = 0; s < steps; ++s) {
      propagator.advance(state.amplitudes, static_cast<double>(s) * dt);
      state.time = static_cast<double>(s + 1) * dt;
      if ((s + 1) % config.record_stride == 0 || s + 1 == steps) record(state);
    }
  } else {
    for (long long s = 0; s < steps; ++s) {
      const double t = static_cast<double>(s) * dt;
      state = step(state, build_action(config.profile, config.drive, config.frame, t + 0.5 * dt), dt);
      state.time = static_cast<double>(s + 1) * dt;
      if ((s + 1) % config.record_stride == 0 || s + 1 == steps) record(state);
    }
  }
  return traj;
}

ConvergenceReport convergence_study(const SimulationConfig& config, const std::vector<double>& dt_list) {
  if (dt_list.size() < 3) throw std::invalid_argument("convergence_study: need at least 3 step sizes");
  for (std::size_t i = 1; i < dt_list.size(); ++i) {
    if (!(dt_list[i] < dt_list[i - 1])) {
      throw std::invalid_argument("convergence_study: step sizes must strictly decrease");
    }
  }
  auto final_state = [&](double dt) {
    SimulationConfig c = config;
    c.dt = dt;
    c.record_stride = std::numeric_limits<int>::max();
    return evolve(c).states.back().amplitudes;
  };
  const std::vector<cplx> reference = final_state(dt_list.back());

  ConvergenceReport report;
  report.finest_dt = dt_list.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i + 1 < dt_list.size(); ++i) {
    const std::vector<cplx> a = final_state(dt_list[i]);
    double err = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) err = std::max(err, std::abs(a[n] - reference[n]));
    report.points.push_back({dt_list[i], err});
    if (err > 0.0) {
      const double x = std::log(dt_list[i]);
      const double y = std::log(err);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  report.order = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx)
                        : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace gfdl
