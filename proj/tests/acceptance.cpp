// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gfdl/exact.hpp"
#include "gfdl/io.hpp"
#include "gfdl/model.hpp"
#include "gfdl/observables.hpp"
#include "gfdl/propagate.hpp"
#include "gfdl/spectra.hpp"

using namespace gfdl;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;
double worst_norm_drift = 0.0;

void report(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %-4s %s | %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Trajectory run(const SimulationConfig& c) {
  Trajectory t = evolve(c);
  for (double n : t.norms) worst_norm_drift = std::max(worst_norm_drift, std::abs(n - 1.0));
  return t;
}

// Independent J0 oracle: (1/pi) int_0^pi cos(x sin s) ds by the trapezoid
// rule, which converges geometrically for this periodic integrand.
double j0_quadrature(double x) {
  const int m = 400;
  double sum = 0.5 * (1.0 + std::cos(0.0));
  for (int i = 1; i < m; ++i) sum += std::cos(x * std::sin(pi * i / m));
  return sum / m;
}

double j0_zero(double lo, double hi) {
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((j0_quadrature(lo) > 0) == (j0_quadrature(mid) > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

SimulationConfig localisation_run(const HoppingProfile& profile, double omega_over_rho, int site, int periods,
                                  int steps_per_period) {
  SimulationConfig c;
  c.profile = profile;
  const double w = omega_over_rho * std::abs(profile.rho());
  c.drive = DriveWaveform::sinusoidal(find_dl_amplitude(DriveFamily::Sinusoidal, w, 1).amplitude, w);
  c.initial = site;
  c.dt = c.drive.period() / steps_per_period;
  c.t_end = periods * c.drive.period();
  c.record_stride = steps_per_period / 40;
  return c;
}

struct Revivals {
  double min_revival = 1.0;
  double max_error = 0.0;
};

Revivals revivals(const Trajectory& t, int periods) {
  Revivals r;
  const std::vector<double> p = revival_probability(t);
  for (int k = 1; k <= periods; ++k) {
    r.min_revival = std::min(r.min_revival, p[nearest_sample(t, k * t.config.drive.period())]);
    r.max_error = std::max(r.max_error, self_imaging_error(t, k).error);
  }
  return r;
}

// max over samples and sites of |numeric - exact|, gauge frame.
double oracle_deviation(const Trajectory& t) {
  const LatticeState init = to_frame(t.config.initial_state(), t.config.drive, Frame::Gauge);
  const auto props = sigma_and_phase_series(t.config.drive, t.config.profile.rho(), t.times);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const LatticeState ex = exact_state(init, props[i]);
    const LatticeState num = to_frame(t.states[i], t.config.drive, Frame::Gauge);
    for (std::size_t n = 0; n < ex.amplitudes.size(); ++n) {
      worst = std::max(worst, std::abs(ex.amplitudes[n] - num.amplitudes[n]));
    }
  }
  return worst;
}

void revival_criterion(const std::string& id, const std::string& what, int sites, double omega_over_rho, int site,
                       double time_limit) {
  const auto start = Clock::now();
  const Trajectory t = run(localisation_run(HoppingProfile::glauber_fock(1.0, sites), omega_over_rho, site, 5, 4000));
  const Revivals r = revivals(t, 5);
  const double elapsed = seconds_since(start);
  const bool ok = r.min_revival >= 0.999 && r.max_error <= 1e-3 && elapsed < time_limit;
  report(id, ok, what,
         "N=" + std::to_string(sites) + " min P_r(kT)=" + fmt(r.min_revival) + " max self-imaging=" + fmt(r.max_error) +
             " time=" + fmt(elapsed) + "s");
}

}  // namespace

int main() {
  // 1, 2
  revival_criterion("1", "revival and self-imaging from site 0", 60, 0.5, 0, 2.0);
  revival_criterion("2", "revival and self-imaging from site 10", 100, 0.5, 10, 2.0);

  // 3
  for (int site : {0, 10}) {
    const Trajectory t = run(localisation_run(HoppingProfile::uniform(1.0, 60), 0.5, site, 10, 4000));
    const Revivals r = revivals(t, 10);
    report(site == 0 ? "3a" : "3b", r.min_revival < 0.9,
           "uniform lattice fails to revive from site " + std::to_string(site),
           "min_{k<=10} P_r(kT)=" + fmt(r.min_revival) + " (threshold < 0.9)");
  }

  // 4
  {
    const auto start = Clock::now();
    SimulationConfig c = localisation_run(HoppingProfile::glauber_fock(1.0, 80), 0.5, 0, 5, 4000);
    const double e1 = oracle_deviation(run(c));
    const double elapsed = seconds_since(start);
    c.dt *= 0.5;
    c.record_stride *= 2;
    const double e2 = oracle_deviation(run(c));
    const double ratio = e1 / e2;
    const double e60 = oracle_deviation(run(localisation_run(HoppingProfile::glauber_fock(1.0, 60), 0.5, 0, 5, 4000)));
    report("4", e1 <= 1e-6 && ratio > 3.5 && ratio < 4.5 && elapsed < 5.0, "numeric vs exact propagator",
           "N=80 max|dc|=" + fmt(e1) + " halved-dt ratio=" + fmt(ratio) + " time=" + fmt(elapsed) +
               "s (N=60 truncation floor " + fmt(e60) + ")");
  }

  // 5
  {
    SimulationConfig c;
    c.profile = HoppingProfile::glauber_fock(1.0, 60);
    c.dt = 1e-3;
    c.t_end = 2.0;
    const Trajectory t = run(c);
    double worst = 0.0;
    const auto& a = t.states.back().amplitudes;
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double poisson = std::exp(n * std::log(4.0) - 4.0 - std::lgamma(n + 1.0));
      worst = std::max(worst, std::abs(std::norm(a[n]) - poisson));
    }
    report("5", worst <= 1e-8, "coherent-state occupations", "max |P_n - Poisson(4)|=" + fmt(worst));
  }

  // 6
  {
    const double r1 = find_dl_amplitude(DriveFamily::Sinusoidal, 1.0, 1).ratio;
    const double r2 = find_dl_amplitude(DriveFamily::Sinusoidal, 1.0, 2).ratio;
    const double z1 = j0_zero(2.0, 3.0), z2 = j0_zero(5.0, 6.0);
    const bool ok = std::abs(r1 - 2.405) <= 1e-3 && std::abs(r1 - z1) <= 1e-6 && std::abs(r2 - 5.5201) <= 1e-3 &&
                    std::abs(r2 - z2) <= 1e-6;
    char detail[160];
    std::snprintf(detail, sizeof detail, "roots %.9f %.9f, quadrature J0 zeros %.9f %.9f", r1, r2, z1, z2);
    report("6", ok, "localisation root finder", detail);
  }

  // 7
  {
    const double w = 0.5;
    const DlRoot root = find_dl_amplitude(DriveFamily::Square, w, 1);
    SimulationConfig c;
    c.profile = HoppingProfile::glauber_fock(1.0, 60);
    c.drive = DriveWaveform::square(root.amplitude, w);
    const double period = c.drive.period();
    const double residual = std::abs(dl_residual(c.drive, period)) / period;
    c.dt = period / 4000;
    c.t_end = period;
    c.record_stride = 100;
    const Trajectory t = run(c);
    const double p = revival_probability(t).back();
    report("7", residual < 1e-8 && p >= 0.999, "square-wave localisation",
           "F0/omega=" + fmt(root.ratio) + " |residual|/T=" + fmt(residual) + " P_r(T)=" + fmt(p));
  }

  // 8
  {
    const StarkLadder ladder = stark_ladder(HoppingProfile::glauber_fock(1.0, 80), 0.5);
    const int run_length = longest_uniform_spacing_run(ladder, 0.5, 1e-6);
    report("8", run_length >= 30, "evenly spaced Wannier-Stark ladder",
           "longest run of spacings = F0 within 1e-6 F0: " + std::to_string(run_length));
  }

  // 9
  {
    const double w = 0.5;
    const DriveWaveform d = DriveWaveform::sinusoidal(find_dl_amplitude(DriveFamily::Sinusoidal, w, 1).amplitude, w);
    std::vector<double> spreads;
    std::vector<int> counts;
    for (int n : {60, 70, 80}) {
      const QuasienergySpectrum q = quasienergy_spectrum(HoppingProfile::glauber_fock(1.0, n), d);
      spreads.push_back(quasienergy_spread(q, true));
      counts.push_back(converged_count(q));
    }
    const QuasienergySpectrum uq = quasienergy_spectrum(HoppingProfile::uniform(1.0, 80), d);
    const double uniform_spread = quasienergy_spread(uq, false);
    bool ok = uniform_spread >= 100.0 * spreads.back();
    for (std::size_t i = 0; i < spreads.size(); ++i) ok = ok && spreads[i] < 1e-4 * w;
    for (std::size_t i = 1; i < counts.size(); ++i) ok = ok && counts[i] > counts[i - 1];
    report("9", ok, "quasienergy collapse",
           "GF spread/omega at N=60,70,80: " + fmt(spreads[0] / w) + ", " + fmt(spreads[1] / w) + ", " +
               fmt(spreads[2] / w) + "; converged levels " + std::to_string(counts[0]) + ", " +
               std::to_string(counts[1]) + ", " + std::to_string(counts[2]) + "; uniform spread/omega " +
               fmt(uniform_spread / w));
  }

  // Frequency spot check
  revival_criterion("F1", "revival at omega/rho = 0.2", 300, 0.2, 0, 2.0);
  revival_criterion("F2", "revival at omega/rho = 1", 60, 1.0, 0, 2.0);
  revival_criterion("F3", "revival at omega/rho = 5", 60, 5.0, 0, 2.0);

  // 10
  {
    SimulationConfig c = localisation_run(HoppingProfile::glauber_fock(1.0, 60), 0.5, 0, 5, 4000);
    const Trajectory lab = run(c);
    c.frame = Frame::Gauge;
    const Trajectory gauge = run(c);
    double frames = 0.0;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      for (std::size_t n = 0; n < lab.states[i].amplitudes.size(); ++n) {
        frames = std::max(frames, std::abs(std::abs(lab.states[i].amplitudes[n]) - std::abs(gauge.states[i].amplitudes[n])));
      }
    }
    double unitarity = 0.0;
    for (cplx beta : {cplx(0.5, 0.2), cplx(-2.0, 3.0), cplx(0.0, 4.7)}) {
      for (int m : {0, 10, 40}) {
        double s = 0.0;
        for (int n = 0; n <= 400; ++n) s += std::norm(displacement_matrix_element(n, m, beta));
        unitarity = std::max(unitarity, std::abs(s - 1.0));
      }
    }
    c.frame = Frame::Lab;
    std::ostringstream first, second;
    io::write_trajectory_csv(first, run(c));
    io::write_trajectory_csv(second, run(c));
    const bool identical = first.str() == second.str();
    const bool ok = worst_norm_drift <= 1e-9 && frames <= 5e-9 && unitarity <= 1e-10 && identical;
    report("10", ok, "invariants",
           "norm drift=" + fmt(worst_norm_drift) + " lab/gauge=" + fmt(frames) + " column unitarity=" + fmt(unitarity) +
               " CSV identical=" + (identical ? "yes" : "no"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
