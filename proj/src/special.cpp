#include "gfdl/special.hpp"

#include <cmath>
#include <stdexcept>

namespace gfdl::special {

namespace {

constexpr double kBig = 1e200;
constexpr double kSeriesLimit = 5.0;

double bessel_series(int k, double x) {
  // sum_j (-1)^j (x/2)^{2j+k} / (j! (j+k)!)
  const double half = 0.5 * x;
  double term = std::exp(k * std::log(half) - std::lgamma(k + 1.0));
  double sum = term;
  const double q = -half * half;
  for (int j = 1; j < 200; ++j) {
    term *= q / (static_cast<double>(j) * (j + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_miller(int k, double x) {
  // Start well above max(k, x); the minimal solution dominates quickly when
  // recurring downward from there.
  const double top = std::max(static_cast<double>(k), x);
  int start = static_cast<int>(top + 30.0 + 6.0 * std::sqrt(top));
  if (start % 2 != 0) ++start;

  double next = 0.0;   // J_{j+1}
  double cur = 1e-30;  // J_j
  double norm = 0.0;   // J_0 + 2 sum J_{2j}
  double result = 0.0;
  const double two_over_x = 2.0 / x;
  for (int j = start; j > 0; --j) {
    const double prev = j * two_over_x * cur - next;  // J_{j-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      next /= kBig;
      norm /= kBig;
      result /= kBig;
    }
    const int idx = j - 1;
    if (idx == k) result = cur;
    if (idx > 0 && idx % 2 == 0) norm += 2.0 * cur;
  }
  norm += cur;
  return result / norm;
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  return std::lgamma(n + 1.0);
}

double bessel_j(int k, double x) {
  if (k < 0) throw std::domain_error("bessel_j: negative order");
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  if (x < 0.0) return (k % 2 == 0 ? 1.0 : -1.0) * bessel_j(k, -x);
  if (x < kSeriesLimit) return bessel_series(k, x);
  return bessel_miller(k, x);
}

ScaledValue laguerre_assoc_scaled(int m, double k, double x) {
  if (m < 0) throw std::domain_error("laguerre_assoc: negative degree");
  ScaledValue out;
  if (m == 0) {
    out.mantissa = 1.0;
    return out;
  }
  double prev = 1.0;
  double cur = 1.0 + k - x;
  double log_scale = 0.0;
  for (int j = 1; j < m; ++j) {
    const double nxt = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = nxt;
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      log_scale += std::log(kBig);
    }
  }
  out.mantissa = cur;
  out.log_scale = log_scale;
  return out;
}

double laguerre_assoc(int m, double k, double x) {
  const ScaledValue v = laguerre_assoc_scaled(m, k, x);
  return v.mantissa * std::exp(v.log_scale);
}

}  // namespace gfdl::special
