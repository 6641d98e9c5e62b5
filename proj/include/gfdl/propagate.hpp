#pragma once

// Time stepping of the truncated driven lattice.
//
// Two one-step methods are provided:
//  * `step`: Cayley/midpoint form for an arbitrary Hermitian tridiagonal
//    generator, (I + i dt/2 H) psi' = (I - i dt/2 H) psi, O(N) per step.
//  * `SplitStepPropagator`: second-order splitting of H(t) = K + F(t) n into
//    the exact diagonal phase flow and the constant hopping flow exp(-i tau K),
//    using McLachlan's error-optimised coefficients. Default for `evolve`.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfdl/model.hpp"

namespace gfdl {

/// Hermitian tridiagonal H: H_{n,n} = diagonal[n], H_{n,n+1} = super[n],
/// H_{n+1,n} = sub[n] = conj(super[n]).
struct TridiagonalAction {
  std::vector<double> diagonal;
  std::vector<cplx> super;
  std::vector<cplx> sub;

  bool hermitian() const;
  int size() const { return static_cast<int>(diagonal.size()); }
  /// y = H x.
  void apply(const cplx* x, cplx* y) const;
};

/// Lab frame: couplings -k_{n+1}, diagonal n F(t).
/// Gauge frame: couplings -k_{n+1} exp(-i Phi(t)) (upper), zero diagonal.
TridiagonalAction build_action(const HoppingProfile& profile, const DriveWaveform& drive, Frame frame,
                               double t);

/// One Cayley step with the generator evaluated by the caller (normally at
/// the interval midpoint). dt may be negative to step backwards.
LatticeState step(const LatticeState& state, const TridiagonalAction& action, double dt);

/// exp(-i tau K) for a constant Hermitian tridiagonal K, applied through a
/// Chebyshev expansion whose coefficients are 2 (-i)^k J_k(tau lambda).
class ChebyshevExponential {
 public:
  ChebyshevExponential(TridiagonalAction generator, double tau);
  /// In place on a contiguous vector of generator.size() entries.
  void apply(cplx* v) const;
  int terms() const { return static_cast<int>(coefficients_.size()); }

 private:
  TridiagonalAction scaled_;  // K / lambda
  cplx shift_phase_ = 1.0;  // exp(-i tau center)
  std::vector<cplx> coefficients_;
};

/// McLachlan-weighted split step for H(t) = K + F(t) n (lab frame) or its
/// exact gauge image. Advances [t, t + dt].
class SplitStepPropagator {
 public:
  static constexpr double kNode = 0.1931833275037836;

  SplitStepPropagator(const HoppingProfile& profile, const DriveWaveform& drive, Frame frame, double dt);

  void advance(std::vector<cplx>& amplitudes, double t) const;
  /// Advances every column of `columns` (rows = sites).
  void advance(Eigen::MatrixXcd& columns, double t) const;
  double dt() const { return dt_; }

 private:
  std::vector<cplx> phase_factors(double theta) const;
  void advance_column(cplx* v, const std::vector<cplx>& p0, const std::vector<cplx>& p1,
                      const std::vector<cplx>& p2) const;
  std::array<double, 3> phase_steps(double t) const;

  DriveWaveform drive_;
  Frame frame_;
  double dt_;
  int size_;
  ChebyshevExponential half_hop_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<LatticeState> states;
  std::vector<double> norms;
  SimulationConfig config;
  std::vector<std::string> warnings;
  double max_leakage = 0.0;  ///< max over samples of weight on the top 5 sites

  std::size_t size() const { return states.size(); }
};

constexpr double kLeakageThreshold = 1e-6;
constexpr int kLeakageSites = 5;

/// Weight on the top kLeakageSites sites.
double boundary_weight(const std::vector<cplx>& amplitudes);

/// Steps from 0 to t_end (n = round(t_end/dt) steps of exactly dt) and records
/// the initial state, every record_stride-th step and the final step.
Trajectory evolve(const SimulationConfig& config);

struct ConvergencePoint {
  double dt = 0.0;
  double error = 0.0;  ///< max_n |c_n(t_end) - c_n^finest(t_end)|
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;  ///< every dt except the finest
  double finest_dt = 0.0;
  double order = 0.0;  ///< least-squares slope of log(error) vs log(dt)
};

/// Self-convergence study. dt_list needs >= 3 strictly decreasing entries.
ConvergenceReport convergence_study(const SimulationConfig& config, const std::vector<double>& dt_list);

}  // namespace gfdl
