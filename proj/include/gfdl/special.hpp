#pragma once

// Special functions needed by the exact propagator and the Chebyshev
// hopping flow: integer-order Bessel J_k, associated Laguerre polynomials
// and log-factorials.

namespace gfdl::special {

/// log(n!) for n >= 0.
double log_factorial(int n);

/// Bessel function of the first kind J_k(x), integer order k >= 0,
/// |x| <= 1e4. Absolute error below 1e-12.
///
/// Small arguments use the ascending series; everything else uses Miller's
/// backward recurrence normalised by J_0 + 2 sum_j J_{2j} = 1.
double bessel_j(int k, double x);

/// Associated Laguerre polynomial L_m^{(k)}(x) from the three-term
/// recurrence in m. Valid for m <= 400, k >= 0, x >= 0.
double laguerre_assoc(int m, double k, double x);

/// Laguerre value as mantissa * exp(log_scale). The recurrence is rescaled
/// whenever it leaves a safe range, so products with tiny prefactors
/// (displacement matrix elements at large |beta|) never overflow.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
};

ScaledValue laguerre_assoc_scaled(int m, double k, double x);

}  // namespace gfdl::special
