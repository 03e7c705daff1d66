#pragma once

// VerificationReport: the record every checker returns.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lensgamma/params.hpp"

namespace lensgamma {

using ordered_json = nlohmann::ordered_json;

/// Below this |rhs| the absolute residual decides pass/fail.
inline constexpr double absolute_residual_threshold = 1e-10;

enum class ReportStatus { pass, fail, non_convergence, contour_violation, invalid_parameter };

inline std::string_view to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::pass:
      return "pass";
    case ReportStatus::fail:
      return "fail";
    case ReportStatus::non_convergence:
      return "non_convergence";
    case ReportStatus::contour_violation:
      return "contour_violation";
    case ReportStatus::invalid_parameter:
      return "invalid_parameter";
  }
  return "unknown";
}

struct NumericsMeta {
  std::int64_t nodes = 0;          // integrand evaluations (quadrature nodes)
  std::int64_t truncation = 0;     // deepest product index or outer truncation |n| <= N
  double tail_bound = 0.0;         // truncation tail bound, relative to |rhs|
  double quadrature_error = 0.0;   // quadrature error estimate, relative to |rhs|
  bool converged = true;
  double runtime_seconds = 0.0;    // serialized only on request
};

struct VerificationReport {
  std::string identity_name;
  ordered_json parameters = ordered_json::object();
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// False for diagnostic checks that never gate acceptance.
  bool gate = true;
  ReportStatus status = ReportStatus::fail;
  NumericsMeta meta;
  std::uint64_t seed = 0;
  ordered_json details = ordered_json::object();

  /// Fills residuals, pass and status from lhs, rhs, tolerance and meta.converged.
  void finalize() {
    abs_residual = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    rel_residual = scale > 0.0 ? abs_residual / scale : 0.0;
    const double measure =
        std::abs(rhs) < absolute_residual_threshold ? abs_residual : rel_residual;
    pass = measure <= tolerance;
    if (!meta.converged) {
      status = ReportStatus::non_convergence;
    } else {
      status = pass ? ReportStatus::pass : ReportStatus::fail;
    }
  }
};

/// Measures wall time into meta.runtime_seconds on destruction.
class ScopedTimer {
 public:
  explicit ScopedTimer(NumericsMeta& meta) : meta_(meta), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    meta_.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  NumericsMeta& meta_;
  std::chrono::steady_clock::time_point start_;
};

inline ordered_json to_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

inline ordered_json to_json(const NomeParameters& np) {
  ordered_json j = ordered_json::object();
  j["sigma"] = to_json(np.sigma());
  j["tau"] = to_json(np.tau());
  j["r"] = np.r();
  return j;
}

}  // namespace lensgamma
