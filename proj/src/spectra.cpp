#include "gfdl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gfdl/errors.hpp"
#include "gfdl/propagate.hpp"

namespace gfdl {

namespace {

// Distance on the circle of circumference `period`.
double circular_distance(double a, double b, double period) {
  double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

Eigen::MatrixXcd dense_hamiltonian(const TridiagonalAction& h) {
  const int n = h.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = h.diagonal[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      m(i, i + 1) = h.super[static_cast<std::size_t>(i)];
      m(i + 1, i) = h.sub[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

}  // namespace

MonodromyMatrix monodromy(const HoppingProfile& profile, const DriveWaveform& drive,
                          const MonodromyOptions& options, double nominal_period) {
  double period = nominal_period;
  if (drive.periodic()) {
    period = drive.period();
  } else if (!(drive.kind() == DriveKind::None && nominal_period > 0.0)) {
    throw std::domain_error("monodromy: drive is not periodic");
  }
  if (options.steps_per_period < 1) throw std::invalid_argument("monodromy: steps_per_period < 1");

  MonodromyMatrix out;
  out.period = period;
  out.omega = 2.0 * std::numbers::pi / period;
  out.profile = profile;
  out.drive = drive;

  const int size = profile.size();
  const double dt = period / options.steps_per_period;
  const SplitStepPropagator propagator(profile, drive, Frame::Lab, dt);
  out.matrix = Eigen::MatrixXcd::Identity(size, size);
  for (int s = 0; s < options.steps_per_period; ++s) propagator.advance(out.matrix, s * dt);

  const int first = std::max(0, size - kLeakageSites);
  for (int c = 0; c < size; ++c) {
    const double w = out.matrix.col(c).segment(first, size - first).squaredNorm();
    if (w > kLeakageThreshold) out.leaking_columns.push_back(c);
  }
  return out;
}

QuasienergySpectrum quasienergies(const MonodromyMatrix& u) {
  const Eigen::MatrixXcd& m = u.matrix;
  const Eigen::Index n = m.rows();
  const double defect =
      (m.adjoint() * m - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > kUnitarityTolerance) {
    std::ostringstream msg;
    msg << "quasienergies: monodromy is not unitary (max |U^+U - I| = " << defect << ")";
    throw NumericalValidityError(msg.str());
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalValidityError("quasienergies: eigensolver failed");
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  QuasienergySpectrum out;
  out.omega = u.omega;
  out.period = u.period;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXcd v = vectors.col(j).normalized();
    const double residual = (m * v - values(j) * v).norm();
    if (residual > kEigenResidualTolerance) {
      std::ostringstream msg;
      msg << "quasienergies: eigenpair residual " << residual << " exceeds tolerance";
      throw NumericalValidityError(msg.str());
    }
    double eps = -std::arg(values(j)) / u.period;
    if (eps <= -0.5 * u.omega) eps += u.omega;
    if (eps > 0.5 * u.omega) eps -= u.omega;
    out.values.push_back(eps);
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

QuasienergySpectrum quasienergy_spectrum(const HoppingProfile& profile, const DriveWaveform& drive,
                                         const MonodromyOptions& options) {
  QuasienergySpectrum base = quasienergies(monodromy(profile, drive, options));
  const QuasienergySpectrum wider = quasienergies(
      monodromy(profile.with_truncation(profile.truncation() + kConvergenceExtraSites), drive, options));
  const double tol = kConvergenceTolerance * base.omega;
  base.converged.assign(base.values.size(), false);
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    for (double w : wider.values) {
      if (circular_distance(base.values[i], w, base.omega) <= tol) {
        base.converged[i] = true;
        break;
      }
    }
  }
  return base;
}

double quasienergy_spread(const QuasienergySpectrum& spectrum, bool converged_only) {
  std::vector<double> x;
  for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
    if (!converged_only || (i < spectrum.converged.size() && spectrum.converged[i])) {
      x.push_back(spectrum.values[i]);
    }
  }
  if (x.size() < 2) return 0.0;
  std::sort(x.begin(), x.end());
  // Shortest covering arc = circumference minus the largest gap.
  double largest_gap = x.front() + spectrum.omega - x.back();
  for (std::size_t i = 1; i < x.size(); ++i) largest_gap = std::max(largest_gap, x[i] - x[i - 1]);
  return spectrum.omega - largest_gap;
}

int converged_count(const QuasienergySpectrum& spectrum) {
  return static_cast<int>(std::count(spectrum.converged.begin(), spectrum.converged.end(), true));
}

std::vector<double> stark_spectrum(const HoppingProfile& profile, double f0) {
  if (!(f0 >= 0.0)) throw std::invalid_argument("stark_spectrum: F0 must be >= 0");
  const TridiagonalAction h = build_action(profile, DriveWaveform::dc(f0), Frame::Lab, 0.0);
  const Eigen::MatrixXcd dense = dense_hamiltonian(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success) throw NumericalValidityError("stark_spectrum: eigensolver failed");

  const Eigen::VectorXd& values = solver.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const Eigen::VectorXcd v = solver.eigenvectors().col(j);
    const double residual = (dense * v - values(j) * v).norm();
    if (residual > kEigenResidualTolerance * scale) {
      throw NumericalValidityError("stark_spectrum: eigenpair residual exceeds tolerance");
    }
  }
  return {values.data(), values.data() + values.size()};
}

StarkLadder stark_ladder(const HoppingProfile& profile, double f0) {
  StarkLadder out;
  out.values = stark_spectrum(profile, f0);
  const std::vector<double> wider =
      stark_spectrum(profile.with_truncation(profile.truncation() + kConvergenceExtraSites), f0);
  for (double v : out.values) out.norm = std::max(out.norm, std::abs(v));
  const double tol = kConvergenceTolerance * std::max(out.norm, 1e-300);
  out.converged.resize(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.converged[i] = std::abs(out.values[i] - wider[i]) <= tol;
  }
  for (std::size_t i = 1; i < out.values.size(); ++i) out.spacing.push_back(out.values[i] - out.values[i - 1]);
  return out;
}

int longest_uniform_spacing_run(const StarkLadder& ladder, double target, double rel_tol) {
  int best = 0;
  int run = 0;
  for (std::size_t i = 0; i < ladder.spacing.size(); ++i) {
    const bool ok = ladder.converged[i] && ladder.converged[i + 1] &&
                    std::abs(ladder.spacing[i] - target) <= rel_tol * std::abs(target);
    run = ok ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace gfdl
