#pragma once

// Lattice and drive definitions for ac-driven semi-infinite tight-binding
// chains:
//
//   i dc_n/dt = -k_{n+1} c_{n+1} - k_n^* c_{n-1} + n F(t) c_n,   k_0 = 0,
//
// truncated at site N. The gauge frame b_n = c_n exp(+i n Phi(t)) moves the
// force into time-dependent couplings k_n exp(-i Phi(t)).

#include <complex>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace gfdl {

using cplx = std::complex<double>;

enum class ProfileKind { Uniform, GlauberFock, Custom };

/// Rule n -> k_n for sites 0..N. Magnitudes live in the table; the phase of
/// the (possibly complex) scale rho is carried on the coupling.
class HoppingProfile {
 public:
  static HoppingProfile uniform(cplx rho, int sites);
  static HoppingProfile glauber_fock(cplx rho, int sites);
  /// table[j] is the dimensionless shape of k_{j+1}: k_n = |rho| * table[n-1].
  static HoppingProfile custom(cplx rho, std::vector<double> table, int sites);

  ProfileKind kind() const { return kind_; }
  cplx rho() const { return rho_; }
  /// Truncation index N; the lattice holds N + 1 sites.
  int truncation() const { return sites_; }
  int size() const { return sites_ + 1; }
  const std::vector<double>& table() const { return table_; }

  /// Hopping magnitude k_n between sites n-1 and n. k_0 = 0.
  /// Throws std::out_of_range unless 0 <= n <= N.
  double hopping(int n) const;

  /// Complex hopping k_n * rho/|rho|; the Hamiltonian element H_{n-1,n} is
  /// minus this value.
  cplx coupling(int n) const;

  /// Same profile re-truncated at a different N.
  HoppingProfile with_truncation(int sites) const;

 private:
  HoppingProfile(ProfileKind kind, cplx rho, std::vector<double> table, int sites);

  ProfileKind kind_;
  cplx rho_;
  std::vector<double> table_;
  int sites_;
};

enum class DriveKind { None, Dc, Sinusoidal, Square, Sampled };

/// External force F(t). Periodic kinds carry omega and T = 2 pi / omega.
/// A time-origin shift t0 evaluates the base waveform at t + t0 while keeping
/// Phi(0) = 0.
class DriveWaveform {
 public:
  static DriveWaveform none();
  static DriveWaveform dc(double f0);
  /// F(t) = f0 cos(omega (t + t0)).
  static DriveWaveform sinusoidal(double f0, double omega, double t0 = 0.0);
  /// +f0 on [0, T/2), -f0 on [T/2, T), repeated.
  static DriveWaveform square(double f0, double omega, double t0 = 0.0);
  /// Samples at t_j = j T / M, j = 0..M-1, linear interpolation, periodic.
  static DriveWaveform sampled(std::vector<double> samples, double omega, double t0 = 0.0);

  DriveKind kind() const { return kind_; }
  double amplitude() const { return f0_; }
  double omega() const { return omega_; }
  double time_origin() const { return t0_; }
  const std::vector<double>& samples() const { return samples_; }

  bool periodic() const;
  /// Throws std::domain_error for non-periodic kinds.
  double period() const;

  double force(double t) const;

  /// Phi(t) = integral_0^t F. Exact for every kind (closed form or piecewise
  /// polynomial).
  double phase(double t) const;

  /// Times in the open interval (a, b) where F or F' jumps. Integrals of
  /// exp(-i Phi) are split there.
  std::vector<double> breakpoints(double a, double b) const;

  /// Natural time scale for quadrature panel sizing.
  double time_scale() const;

  DriveWaveform shifted(double t0) const;

 private:
  DriveWaveform(DriveKind kind, double f0, double omega, double t0, std::vector<double> samples);
  double base_force(double s) const;
  double base_antiderivative(double s) const;

  DriveKind kind_;
  double f0_;
  double omega_;
  double t0_;
  std::vector<double> samples_;
  std::vector<double> cumulative_;  // sampled: integral up to each node
};

enum class Frame { Lab, Gauge };
enum class GaugeDirection { LabToGauge, GaugeToLab };

std::string_view to_string(Frame frame);

struct LatticeState {
  std::vector<cplx> amplitudes;
  double time = 0.0;
  Frame frame = Frame::Lab;

  double norm_squared() const;
  int truncation() const { return static_cast<int>(amplitudes.size()) - 1; }
};

/// Single site excitation or an explicit amplitude vector.
using InitialExcitation = std::variant<int, std::vector<cplx>>;

enum class Integrator { Split, Cayley };

struct SimulationConfig {
  HoppingProfile profile = HoppingProfile::glauber_fock(1.0, 60);
  DriveWaveform drive = DriveWaveform::none();
  InitialExcitation initial = 0;
  double dt = 1e-3;
  double t_end = 0.0;
  int record_stride = 1;
  Frame frame = Frame::Lab;
  Integrator integrator = Integrator::Split;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// Normalised initial state at t = 0 in `frame`.
  LatticeState initial_state() const;
};

double hopping(const HoppingProfile& profile, int n);

double phase_integral(const DriveWaveform& drive, double t);

/// sigma(t) = rho * integral_0^t exp(-i Phi(t')) dt'.
cplx sigma(const DriveWaveform& drive, cplx rho, double t);

/// integral_0^T exp(-i Phi(t)) dt. Zero exactly when the drive localises.
/// Throws std::domain_error for a non-periodic drive or a T that is not the
/// drive's period. DriveKind::None accepts any T.
cplx dl_residual(const DriveWaveform& drive, double period);

enum class DriveFamily { Sinusoidal, Square };

struct DlRoot {
  int index = 0;
  double amplitude = 0.0;  ///< F0
  double ratio = 0.0;      ///< F0 / omega
  double residual = 0.0;   ///< |dl_residual| / T at the root
};

struct DlSearchOptions {
  double ratio_step = 0.05;
  double ratio_max = 20.0;
  /// Candidate sign changes of Re(residual) are accepted only if
  /// |residual| / T falls below this.
  double accept_tolerance = 1e-6;
};

DriveWaveform family_drive(DriveFamily family, double f0, double omega);

/// k-th smallest F0 > 0 satisfying the localisation condition for the
/// family at frequency omega. Throws SearchError if the scan runs out.
DlRoot find_dl_amplitude(DriveFamily family, double omega, int k,
                         const DlSearchOptions& options = {});

LatticeState gauge_transform(const LatticeState& state, const DriveWaveform& drive,
                             GaugeDirection direction);

/// Converts to `target` frame (no-op if already there).
LatticeState to_frame(const LatticeState& state, const DriveWaveform& drive, Frame target);

}  // namespace gfdl
