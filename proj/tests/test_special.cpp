#include <cmath>
#include <random>

#include "doctest.h"

#include "gfdl/special.hpp"

using namespace gfdl::special;

TEST_CASE("bessel_j matches the standard library") {
  for (int k : {0, 1, 2, 5, 17, 40}) {
    for (double x : {0.0, 1e-3, 0.7, 2.404825557695773, 4.99, 5.01, 12.3, 57.0, 300.0}) {
      const double ref = std::cyl_bessel_j(static_cast<double>(k), x);
      CHECK(std::abs(bessel_j(k, x) - ref) < 1e-12);
    }
  }
}

TEST_CASE("bessel_j parity for negative arguments") {
  for (int k = 0; k < 6; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    CHECK(bessel_j(k, -3.3) == doctest::Approx(sign * bessel_j(k, 3.3)).epsilon(1e-14));
  }
}

TEST_CASE("bessel_j at the origin") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
}

TEST_CASE("bessel_j satisfies the Neumann sum (random arguments)") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(0.0, 80.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double x = dist(gen);
    double sum = bessel_j(0, x) * bessel_j(0, x);
    for (int k = 1; k < 200; ++k) sum += 2.0 * bessel_j(k, x) * bessel_j(k, x);
    CHECK(std::abs(sum - 1.0) < 1e-11);
  }
}

TEST_CASE("associated Laguerre against explicit polynomials") {
  for (double x : {0.0, 0.5, 3.0, 11.0}) {
    CHECK(laguerre_assoc(0, 2, x) == doctest::Approx(1.0));
    CHECK(laguerre_assoc(1, 2, x) == doctest::Approx(3.0 - x));
    const double l32 = (-x * x * x + 15.0 * x * x - 60.0 * x + 60.0) / 6.0;
    CHECK(laguerre_assoc(3, 2, x) == doctest::Approx(l32).epsilon(1e-13));
  }
}

TEST_CASE("associated Laguerre at zero equals a binomial") {
  // L_m^(k)(0) = C(m + k, m)
  for (int m = 0; m < 30; ++m) {
    const double binom = std::exp(std::lgamma(m + 4.0 + 1.0) - std::lgamma(m + 1.0) - std::lgamma(5.0));
    CHECK(laguerre_assoc(m, 4, 0.0) == doctest::Approx(binom).epsilon(1e-12));
  }
}

TEST_CASE("scaled Laguerre agrees with the plain value where both fit") {
  for (int m : {5, 40, 120}) {
    for (double x : {0.3, 7.0, 60.0}) {
      const ScaledValue s = laguerre_assoc_scaled(m, 3, x);
      const double plain = laguerre_assoc(m, 3, x);
      CHECK(s.mantissa * std::exp(s.log_scale) == doctest::Approx(plain).epsilon(1e-10));
    }
  }
}

TEST_CASE("scaled Laguerre stays finite at large order") {
  const ScaledValue s = laguerre_assoc_scaled(400, 0, 500.0);
  CHECK(std::isfinite(s.mantissa));
  CHECK(std::isfinite(s.log_scale));
}

TEST_CASE("log_factorial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)));
}
