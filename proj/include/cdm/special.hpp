#pragma once

#include <cmath>
#include <numbers>

#include "cdm/error.hpp"

namespace cdm {

// ln Γ(x) for x > 0.
//
// Arguments below 15 are shifted up with Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
// and the asymptotic Stirling series is evaluated at the shifted point,
// where seven correction terms are below double precision. Unlike
// std::lgamma this never touches the global `signgam`, so concurrent calls
// are race free.
inline double log_gamma(double x) {
  if (!(x > 0.0) || std::isinf(x)) {
    throw DomainError("log_gamma: argument must be finite and positive");
  }
  if (x == 1.0 || x == 2.0) return 0.0;

  double product = 1.0;
  while (x < 15.0) {
    product *= x;
    x += 1.0;
  }

  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number coefficients B_2k / (2k (2k - 1)), Horner form in 1/x².
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0)))))));
  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return (x - 0.5) * std::log(x) - x + half_log_two_pi + series - std::log(product);
}

// ln k! via ln Γ(k + 1).
inline double log_factorial(long long k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  return log_gamma(static_cast<double>(k) + 1.0);
}

}  // namespace cdm
