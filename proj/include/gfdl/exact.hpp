#pragma once

// Closed-form evolution of the Glauber-Fock lattice in the gauge frame.
//
// The gauge-frame equations are the Fock-space image of the bosonic
// Hamiltonian H(t) = -rho(t) a - rho(t)^* a^+, rho(t) = rho exp(-i Phi(t)).
// Commutators of H at different times are c-numbers, so the propagator is a
// displacement times a phase:
//
//   U(t) = exp(i phi(t)) D(beta(t)),   D(beta) = exp(beta a^+ - beta^* a),
//   beta(t) = i sigma(t)^*,            phi(t) = integral_0^t Im{sigma rho(t')^*} dt'.

#include <span>
#include <vector>

#include "gfdl/model.hpp"

namespace gfdl {

struct DisplacementPropagator {
  double t = 0.0;
  cplx sigma = 0.0;
  cplx beta = 0.0;
  double phi_global = 0.0;
};

DisplacementPropagator sigma_and_phase(const DriveWaveform& drive, cplx rho, double t);

/// Same quantities at every entry of `times` (any order, all >= 0), computed
/// in a single cumulative pass. Output order follows `times`.
std::vector<DisplacementPropagator> sigma_and_phase_series(const DriveWaveform& drive, cplx rho,
                                                           std::span<const double> times);

/// <n| D(beta) |m>, evaluated in the log domain through associated Laguerre
/// polynomials. Finite for n, m <= 400.
cplx displacement_matrix_element(int n, int m, cplx beta);

/// Minimum number of empty sites above the initial support.
constexpr int kExactHeadroom = 20;
/// Input amplitudes below this fraction of the largest are dropped.
constexpr double kExactTailCutoff = 1e-14;

/// Gauge-frame amplitudes at propagator.t from gauge-frame amplitudes at 0.
/// Throws HeadroomError if the initial support reaches above N - 20.
LatticeState exact_state(const LatticeState& initial, const DisplacementPropagator& propagator);

LatticeState exact_state(const LatticeState& initial, const DriveWaveform& drive, cplx rho, double t);

/// exact_state composed with the gauge transform back to lab amplitudes.
LatticeState exact_lab_state(const LatticeState& initial, const DriveWaveform& drive,
                             const DisplacementPropagator& propagator);

}  // namespace gfdl
