#pragma once

#include <cmath>
#include <numbers>

namespace oralab::detail {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// P(a <= Z <= b) without cancellation in either tail.
inline double normal_mass(double a, double b) {
  if (b <= a) return 0.0;
  if (a >= 0.0) {
    return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  }
  if (b <= 0.0) {
    return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  }
  return 1.0 - 0.5 * std::erfc(b / std::numbers::sqrt2) -
         0.5 * std::erfc(-a / std::numbers::sqrt2);
}

// Lambda(-s) = phi(s) - s * Phi(-s), the integrated lower tail of the normal
// cdf. Lambda(s) = s + Lambda(-s).
inline double integrated_tail(double s) {
  return normal_pdf(s) - s * 0.5 * std::erfc(s / std::numbers::sqrt2);
}

}  // namespace oralab::detail
