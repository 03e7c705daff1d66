#pragma once

#include <cstdint>

#include "lensgamma/errors.hpp"

namespace lensgamma {

/// Representative of m modulo r in {0, ..., r-1}.
inline std::int64_t mod_bracket(std::int64_t m, std::int64_t r) {
  require(r >= 1, ErrorKind::invalid_parameter, "mod_bracket: lens order r must be >= 1");
  const std::int64_t rem = m % r;
  return rem < 0 ? rem + r : rem;
}

/// [[m]]_r * [[-m]]_r. Vanishes exactly when r divides m.
inline std::int64_t bracket_pm(std::int64_t m, std::int64_t r) {
  return mod_bracket(m, r) * mod_bracket(-m, r);
}

}  // namespace lensgamma
