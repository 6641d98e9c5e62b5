#include "gfdl/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "gfdl/errors.hpp"
#include "gfdl/special.hpp"
#include "quadrature.hpp"

namespace gfdl {

namespace {

using detail::kGaussPoints;

// integration[i][j] = integral_{-1}^{node_i} l_j(s) ds for the Lagrange basis
// on the Gauss nodes. Integrating the interpolant of rho(t) gives sigma at the
// interior nodes of a panel.
using IntegrationMatrix = std::array<std::array<double, kGaussPoints>, kGaussPoints>;

const IntegrationMatrix& integration_matrix() {
  static const IntegrationMatrix matrix = [] {
    const auto& rule = detail::gauss_rule();
    auto lagrange = [&](int j, double s) {
      double v = 1.0;
      for (int k = 0; k < kGaussPoints; ++k) {
        if (k != j) v *= (s - rule.nodes[k]) / (rule.nodes[j] - rule.nodes[k]);
      }
      return v;
    };
    IntegrationMatrix m{};
    for (int i = 0; i < kGaussPoints; ++i) {
      const double upper = rule.nodes[i];
      const double half = 0.5 * (upper + 1.0);
      const double mid = 0.5 * (upper - 1.0);
      for (int j = 0; j < kGaussPoints; ++j) {
        double sum = 0.0;
        for (int k = 0; k < kGaussPoints; ++k) sum += rule.weights[k] * lagrange(j, mid + half * rule.nodes[k]);
        m[i][j] = half * sum;
      }
    }
    return m;
  }();
  return matrix;
}

struct Accumulator {
  cplx sigma = 0.0;
  double phi = 0.0;
};

// Advances sigma and phi across one panel [a, b].
void advance_panel(const DriveWaveform& drive, cplx rho, double a, double b, Accumulator& acc) {
  const auto& rule = detail::gauss_rule();
  const auto& integ = integration_matrix();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::array<cplx, kGaussPoints> rate{};
  for (int i = 0; i < kGaussPoints; ++i) rate[i] = rho * detail::unit_phasor(drive, mid + half * rule.nodes[i]);

  cplx increment = 0.0;
  double phase = 0.0;
  for (int i = 0; i < kGaussPoints; ++i) {
    cplx partial = 0.0;
    for (int j = 0; j < kGaussPoints; ++j) partial += integ[i][j] * rate[j];
    const cplx sigma_i = acc.sigma + half * partial;
    phase += rule.weights[i] * std::imag(sigma_i * std::conj(rate[i]));
    increment += rule.weights[i] * rate[i];
  }
  acc.sigma += half * increment;
  acc.phi += half * phase;
}

std::vector<DisplacementPropagator> integrate_series(const DriveWaveform& drive, cplx rho,
                                                     const std::vector<double>& sorted, double width) {
  std::vector<DisplacementPropagator> out;
  out.reserve(sorted.size());
  const double tmax = sorted.back();
  std::vector<double> grid = tmax > 0.0 ? detail::panel_grid(drive, 0.0, tmax, width, sorted)
                                        : std::vector<double>{0.0};
  Accumulator acc;
  std::size_t next = 0;
  auto emit = [&](double t) {
    while (next < sorted.size() && sorted[next] <= t) {
      DisplacementPropagator p;
      p.t = sorted[next];
      p.sigma = acc.sigma;
      p.beta = cplx(0.0, 1.0) * std::conj(acc.sigma);
      p.phi_global = acc.phi;
      out.push_back(p);
      ++next;
    }
  };
  emit(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    advance_panel(drive, rho, grid[i - 1], grid[i], acc);
    emit(grid[i]);
  }
  return out;
}

}  // namespace

std::vector<DisplacementPropagator> sigma_and_phase_series(const DriveWaveform& drive, cplx rho,
                                                           std::span<const double> times) {
  if (times.empty()) return {};
  for (double t : times) {
    if (!(t >= 0.0)) throw std::domain_error("sigma_and_phase: t must be >= 0");
  }
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });
  std::vector<double> sorted(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = times[order[i]];

  double width = detail::base_panel_width(drive, sorted.back());
  std::vector<DisplacementPropagator> coarse = integrate_series(drive, rho, sorted, width);
  for (int level = 0; level < detail::kMaxRefinements; ++level) {
    width *= 0.5;
    std::vector<DisplacementPropagator> fine = integrate_series(drive, rho, sorted, width);
    const auto& a = coarse.back();
    const auto& b = fine.back();
    const bool sigma_ok =
        std::abs(a.sigma - b.sigma) <= detail::kRefineTolerance * (1.0 + std::abs(b.sigma));
    const bool phi_ok =
        std::abs(a.phi_global - b.phi_global) <= detail::kRefineTolerance * (1.0 + std::abs(b.phi_global));
    coarse = std::move(fine);
    if (sigma_ok && phi_ok) break;
  }

  std::vector<DisplacementPropagator> out(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = coarse[i];
  return out;
}

DisplacementPropagator sigma_and_phase(const DriveWaveform& drive, cplx rho, double t) {
  const double times[] = {t};
  return sigma_and_phase_series(drive, rho, times).front();
}

cplx displacement_matrix_element(int n, int m, cplx beta) {
  if (n < 0 || m < 0) throw std::out_of_range("displacement_matrix_element: negative Fock index");
  const double r = std::abs(beta);
  if (r == 0.0) return n == m ? 1.0 : 0.0;

  // n >= m: sqrt(m!/n!) beta^{n-m} e^{-|b|^2/2} L_m^{(n-m)}(|b|^2)
  // n <  m: sqrt(n!/m!) (-beta^*)^{m-n} e^{-|b|^2/2} L_n^{(m-n)}(|b|^2)
  const int lo = std::min(n, m);
  const int hi = std::max(n, m);
  const int k = hi - lo;
  const cplx base = n >= m ? beta : -std::conj(beta);
  const double x = r * r;
  const special::ScaledValue lag = special::laguerre_assoc_scaled(lo, k, x);
  if (lag.mantissa == 0.0) return 0.0;
  const double log_mag = 0.5 * (special::log_factorial(lo) - special::log_factorial(hi)) +
                         k * std::log(r) - 0.5 * x + lag.log_scale;
  return std::polar(std::exp(log_mag) * lag.mantissa, k * std::arg(base));
}

LatticeState exact_state(const LatticeState& initial, const DisplacementPropagator& propagator) {
  if (initial.time != 0.0) throw std::invalid_argument("exact_state: initial state must be at t = 0");
  const int size = static_cast<int>(initial.amplitudes.size());
  const int N = size - 1;

  double largest = 0.0;
  for (const cplx& a : initial.amplitudes) largest = std::max(largest, std::abs(a));
  const double cutoff = kExactTailCutoff * largest;
  int top = -1;
  for (int m = 0; m < size; ++m) {
    if (std::abs(initial.amplitudes[static_cast<std::size_t>(m)]) > cutoff) top = m;
  }
  if (top > N - kExactHeadroom) {
    throw HeadroomError("exact_state: initial support reaches site " + std::to_string(top) +
                        ", above N - " + std::to_string(kExactHeadroom) + " = " +
                        std::to_string(N - kExactHeadroom));
  }

  LatticeState out;
  out.time = propagator.t;
  out.frame = Frame::Gauge;
  out.amplitudes.assign(static_cast<std::size_t>(size), 0.0);
  const cplx global = std::polar(1.0, propagator.phi_global);
  for (int m = 0; m <= top; ++m) {
    const cplx bm = initial.amplitudes[static_cast<std::size_t>(m)];
    if (std::abs(bm) <= cutoff) continue;
    for (int n = 0; n < size; ++n) {
      out.amplitudes[static_cast<std::size_t>(n)] += displacement_matrix_element(n, m, propagator.beta) * bm;
    }
  }
  for (cplx& a : out.amplitudes) a *= global;
  return out;
}

LatticeState exact_state(const LatticeState& initial, const DriveWaveform& drive, cplx rho, double t) {
  return exact_state(initial, sigma_and_phase(drive, rho, t));
}

LatticeState exact_lab_state(const LatticeState& initial, const DriveWaveform& drive,
                             const DisplacementPropagator& propagator) {
  return gauge_transform(exact_state(initial, propagator), drive, GaugeDirection::GaugeToLab);
}

}  // namespace gfdl
