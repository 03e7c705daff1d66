#pragma once

// Complex log-gamma for the gamma-limit weights.
//
// Lanczos approximation (g = 7, 9 coefficients) for Re z >= 1/2 and the
// reflection formula otherwise. log sin(pi z) is evaluated in exponential form
// for large |Im z| so the result never overflows.

#include <array>
#include <cmath>
#include <complex>

#include "lensgamma/errors.hpp"
#include "lensgamma/params.hpp"

namespace lensgamma {

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline cplx log_gamma_right(cplx z) {
  z -= 1.0;
  cplx x = lanczos_coefficients[0];
  for (std::size_t i = 1; i < lanczos_coefficients.size(); ++i) {
    x += lanczos_coefficients[i] / (z + static_cast<double>(i));
  }
  const cplx t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

/// log sin(pi z), any branch (only exp of the result is used).
inline cplx log_sin_pi(cplx z) {
  const double y = z.imag();
  if (y > 20.0) {
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    return std::log(cplx(0.0, 0.5)) - I * pi * z + std::log(1.0 - std::exp(2.0 * I * pi * z));
  }
  if (y < -20.0) {
    // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 i pi z})
    return std::log(cplx(0.0, -0.5)) + I * pi * z + std::log(1.0 - std::exp(-2.0 * I * pi * z));
  }
  return std::log(std::sin(pi * z));
}

}  // namespace detail

/// log Gamma(z) up to an additive multiple of 2 pi i. Raises gamma_pole_hit
/// within 1e-13 of a non-positive integer.
inline cplx log_gamma(cplx z) {
  const double nearest = std::round(z.real());
  if (nearest <= 0.0 && std::abs(z - nearest) < 1e-13) {
    raise(ErrorKind::gamma_pole_hit, "log_gamma: argument at a non-positive integer");
  }
  if (z.real() >= 0.5) return detail::log_gamma_right(z);
  return std::log(pi) - detail::log_sin_pi(z) - detail::log_gamma_right(1.0 - z);
}

}  // namespace lensgamma
