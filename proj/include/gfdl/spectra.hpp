#pragma once

// Floquet monodromy and quasienergies for periodic drives, and static
// Wannier-Stark spectra for a dc force.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfdl/model.hpp"

namespace gfdl {

struct MonodromyMatrix {
  Eigen::MatrixXcd matrix;  ///< U(T), column m = evolved basis state m
  double period = 0.0;
  double omega = 0.0;
  HoppingProfile profile = HoppingProfile::glauber_fock(1.0, 0);
  DriveWaveform drive = DriveWaveform::none();
  std::vector<int> leaking_columns;  ///< columns ending with > 1e-6 on the top 5 sites
};

struct MonodromyOptions {
  int steps_per_period = 4000;
};

/// Evolves every basis state over one period (lab frame, split-step
/// integrator). Throws std::domain_error for a non-periodic drive unless
/// `nominal_period` is given for DriveKind::None.
MonodromyMatrix monodromy(const HoppingProfile& profile, const DriveWaveform& drive,
                          const MonodromyOptions& options = {}, double nominal_period = 0.0);

struct QuasienergySpectrum {
  std::vector<double> values;   ///< ascending, in (-omega/2, omega/2]
  std::vector<bool> converged;  ///< stable against N + 10 (empty if unknown)
  double omega = 0.0;
  double period = 0.0;
};

constexpr double kUnitarityTolerance = 1e-8;
constexpr double kEigenResidualTolerance = 1e-8;
constexpr double kConvergenceTolerance = 1e-8;
constexpr int kConvergenceExtraSites = 10;

/// eps_j = -arg(lambda_j) / T folded into (-omega/2, omega/2], sorted.
/// Throws NumericalValidityError when U is not unitary within 1e-8.
QuasienergySpectrum quasienergies(const MonodromyMatrix& u);

/// Quasienergies at N with convergence flags against N + 10: a level is
/// converged if some N + 10 level lies within 1e-8 omega (mod omega).
QuasienergySpectrum quasienergy_spectrum(const HoppingProfile& profile, const DriveWaveform& drive,
                                         const MonodromyOptions& options = {});

/// Width of the shortest arc (mod omega) holding the selected levels.
double quasienergy_spread(const QuasienergySpectrum& spectrum, bool converged_only);

int converged_count(const QuasienergySpectrum& spectrum);

/// Sorted eigenvalues of the static Hamiltonian with diagonal n F0 and
/// couplings -k_{n+1}.
std::vector<double> stark_spectrum(const HoppingProfile& profile, double f0);

struct StarkLadder {
  std::vector<double> values;
  std::vector<bool> converged;  ///< matches the N + 10 eigenvalue of the same index within 1e-8 ||H||
  std::vector<double> spacing;  ///< values[i+1] - values[i]
  double norm = 0.0;            ///< max |eigenvalue|
};

StarkLadder stark_ladder(const HoppingProfile& profile, double f0);

/// Longest run of consecutive spacings (between converged neighbours) equal
/// to `target` within rel_tol * |target|.
int longest_uniform_spacing_run(const StarkLadder& ladder, double target, double rel_tol);

}  // namespace gfdl
