#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lensgamma {

enum class ErrorKind {
  invalid_parameter,
  divergent_parameter,
  non_convergence,
  pole_hit,
  gamma_pole_hit,
  contour_violation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::divergent_parameter: return "divergent-parameter";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::pole_hit: return "pole-hit";
    case ErrorKind::gamma_pole_hit: return "gamma-pole-hit";
    case ErrorKind::contour_violation: return "contour-violation";
  }
  return "unknown";
}

/// Base class for every failure raised by the library. The kind is what
/// callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) raise(kind, what);
}

}  // namespace lensgamma
