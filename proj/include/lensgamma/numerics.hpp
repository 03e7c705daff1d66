#pragma once

// Error-controlled quadrature and summation:
//   periodic_integrate  trapezoid rule with nested node doubling
//   line_integrate      adaptive Gauss-Kronrod on [-X, X], X doubling, power-law tail correction
//   bilateral_sum       symmetric truncation |n| <= N, N doubling, geometric or power-law tail
//
// Accumulation order is fixed, and the left and right halves are always added
// as a pair, so f(x) and f(-x) produce bit-identical results.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "lensgamma/errors.hpp"
#include "lensgamma/params.hpp"

namespace lensgamma {

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;  // absolute
  std::int64_t nodes_used = 0;
  bool converged = false;
};

struct SumResult {
  cplx value{0.0, 0.0};
  double tail_bound = 0.0;  // absolute
  std::int64_t terms_used = 0;
  bool converged = false;
};

using RealIntegrand = std::function<cplx(double)>;
using TermFunction = std::function<cplx(std::int64_t)>;

/// Converged when the error is below max(abs_tol, rel_tol * |value|).
struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;

  double bound(cplx value) const { return std::max(abs_tol, rel_tol * std::abs(value)); }
};

// ---------------------------------------------------------------------------
// Periodic trapezoid rule

struct PeriodicOptions {
  std::int64_t initial_nodes = 16;
  std::int64_t max_nodes = std::int64_t{1} << 15;
};

/// Integrates a smooth `period`-periodic function over one period. Nodes are
/// doubled until two successive rules agree within tolerance; the reported
/// error is the last inter-refinement difference.
inline QuadratureResult periodic_integrate(const RealIntegrand& f, double period, Tolerance tol,
                                           PeriodicOptions opts = {}) {
  require(period > 0.0, ErrorKind::invalid_parameter, "periodic_integrate: period must be > 0");
  require(tol.abs_tol > 0.0 || tol.rel_tol > 0.0, ErrorKind::invalid_parameter,
          "periodic_integrate: tolerance must be > 0");
  require(opts.initial_nodes >= 1 && opts.max_nodes >= opts.initial_nodes,
          ErrorKind::invalid_parameter, "periodic_integrate: bad node limits");

  std::int64_t n = opts.initial_nodes;
  cplx raw{0.0, 0.0};
  for (std::int64_t k = 0; k < n; ++k) raw += f(period * static_cast<double>(k) / static_cast<double>(n));
  cplx estimate = raw * (period / static_cast<double>(n));

  QuadratureResult result;
  result.value = estimate;
  result.nodes_used = n;
  result.error_estimate = std::numeric_limits<double>::infinity();
  while (2 * n <= opts.max_nodes) {
    const std::int64_t fine = 2 * n;
    cplx odd{0.0, 0.0};
    for (std::int64_t k = 1; k < fine; k += 2) {
      odd += f(period * static_cast<double>(k) / static_cast<double>(fine));
    }
    raw += odd;
    const cplx refined = raw * (period / static_cast<double>(fine));
    result.error_estimate = std::abs(refined - estimate);
    result.value = refined;
    result.nodes_used = fine;
    estimate = refined;
    n = fine;
    if (result.error_estimate <= tol.bound(refined)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::int64_t nodes = 0;
};

inline PanelResult gauss_kronrod_15(const RealIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cplx fc = f(center);
  cplx kronrod = fc * kronrod_weights[7];
  cplx gauss = fc * gauss_weights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[static_cast<std::size_t>(i)];
    const cplx pair = f(center - dx) + f(center + dx);
    kronrod += pair * kronrod_weights[static_cast<std::size_t>(i)];
    if (i % 2 == 1) gauss += pair * gauss_weights[static_cast<std::size_t>(i / 2)];
  }
  PanelResult r;
  r.value = kronrod * half;
  r.error = std::abs((kronrod - gauss) * half);
  r.nodes = 15;
  return r;
}

inline PanelResult adaptive_gauss_kronrod(const RealIntegrand& f, double a, double b, double tol,
                                          int depth) {
  PanelResult whole = gauss_kronrod_15(f, a, b);
  if (whole.error <= tol || depth <= 0) return whole;
  const double mid = 0.5 * (a + b);
  PanelResult left = adaptive_gauss_kronrod(f, a, mid, 0.5 * tol, depth - 1);
  PanelResult right = adaptive_gauss_kronrod(f, mid, b, 0.5 * tol, depth - 1);
  PanelResult sum;
  sum.value = left.value + right.value;
  sum.error = left.error + right.error;
  sum.nodes = whole.nodes + left.nodes + right.nodes;
  return sum;
}

// Power-law tail integral int_X^inf f assuming |f| ~ C x^{-s}, with s fitted
// from f(X/2) and f(X) (the hint is used when the fit is unusable).
// Returns nullopt when neither gives s > 1.
inline std::optional<cplx> power_tail(cplx f_half, cplx f_full, double x, double hint) {
  if (f_full == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
  double s = std::log(std::abs(f_half) / std::abs(f_full)) / std::log(2.0);
  if (!std::isfinite(s) || s <= 1.0) {
    if (hint > 1.0) {
      s = hint;
    } else {
      return std::nullopt;
    }
  }
  return f_full * x / (s - 1.0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Real line

struct LineOptions {
  double initial_cutoff = 8.0;
  double max_cutoff = 4096.0;
  /// When set, integrate on [-X, X] for exactly this X (no cutoff doubling).
  std::optional<double> fixed_cutoff;
  bool tail_correction = true;
  int max_depth = 40;
};

/// Integrates f over the real line. |f| must eventually decay like |x|^{-s},
/// s > 1; `tail_exponent_hint` supplies s when it cannot be fitted (pass 0
/// when unknown). The error estimate combines the change of the corrected
/// value under X -> 2X and the Gauss-Kronrod estimates.
inline QuadratureResult line_integrate(const RealIntegrand& f, Tolerance tol,
                                       double tail_exponent_hint = 0.0, LineOptions opts = {}) {
  require(tol.abs_tol > 0.0 || tol.rel_tol > 0.0, ErrorKind::invalid_parameter,
          "line_integrate: tolerance must be > 0");
  const RealIntegrand mirrored = [&f](double x) { return f(-x); };
  const double x0 = opts.fixed_cutoff.value_or(opts.initial_cutoff);
  require(x0 > 0.0, ErrorKind::invalid_parameter, "line_integrate: cutoff must be > 0");

  // Quadrature error budget per side, relative to the current cutoff.
  const auto panel_tol = [&tol](double len, double cutoff, cplx scale) {
    return 0.05 * tol.bound(scale) * len / (2.0 * cutoff);
  };

  QuadratureResult result;
  cplx scale{1.0, 0.0};
  {
    // Crude magnitude for relative tolerances.
    const auto probe = detail::gauss_kronrod_15(f, -x0, x0);
    scale = probe.value;
    result.nodes_used += probe.nodes;
  }
  auto right = detail::adaptive_gauss_kronrod(f, 0.0, x0, panel_tol(x0, x0, scale), opts.max_depth);
  auto left = detail::adaptive_gauss_kronrod(mirrored, 0.0, x0, panel_tol(x0, x0, scale), opts.max_depth);
  cplx core = right.value + left.value;
  double quad_err = right.error + left.error;
  result.nodes_used += right.nodes + left.nodes;

  const auto corrected = [&](double x, std::optional<cplx>& out) {
    if (!opts.tail_correction) {
      out = cplx(0.0, 0.0);
      return;
    }
    const auto tr = detail::power_tail(f(0.5 * x), f(x), x, tail_exponent_hint);
    const auto tl = detail::power_tail(mirrored(0.5 * x), mirrored(x), x, tail_exponent_hint);
    result.nodes_used += 4;
    if (!tr || !tl) {
      out.reset();
      return;
    }
    out = *tr + *tl;
  };

  std::optional<cplx> tail;
  corrected(x0, tail);
  if (opts.fixed_cutoff) {
    result.value = core + tail.value_or(cplx(0.0, 0.0));
    result.error_estimate = quad_err + (tail ? std::abs(*tail) : std::numeric_limits<double>::infinity());
    result.converged = tail.has_value() && result.error_estimate <= tol.bound(result.value);
    return result;
  }

  cplx previous = core + tail.value_or(cplx(0.0, 0.0));
  bool previous_ok = tail.has_value();
  result.value = previous;
  result.error_estimate = std::numeric_limits<double>::infinity();
  for (double x = x0; 2.0 * x <= opts.max_cutoff; x *= 2.0) {
    const double ptol = panel_tol(x, 2.0 * x, previous);
    auto r = detail::adaptive_gauss_kronrod(f, x, 2.0 * x, ptol, opts.max_depth);
    auto l = detail::adaptive_gauss_kronrod(mirrored, x, 2.0 * x, ptol, opts.max_depth);
    core += r.value + l.value;
    quad_err += r.error + l.error;
    result.nodes_used += r.nodes + l.nodes;
    corrected(2.0 * x, tail);
    const cplx current = core + tail.value_or(cplx(0.0, 0.0));
    result.value = current;
    if (tail && previous_ok) {
      result.error_estimate = std::abs(current - previous) + quad_err;
      if (result.error_estimate <= tol.bound(current)) {
        result.converged = true;
        break;
      }
    }
    previous = current;
    previous_ok = tail.has_value();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bilateral sums

struct SumOptions {
  std::int64_t initial_terms = 8;
  std::int64_t max_terms = 1 << 16;
  /// When set, sum exactly |n| <= N (no doubling).
  std::optional<std::int64_t> fixed_terms;
  bool tail_correction = true;
};

namespace detail {

inline double geometric_side_bound(cplx f_n, cplx f_n1, cplx f_n2) {
  const double a = std::abs(f_n);
  const double b = std::abs(f_n1);
  const double c = std::abs(f_n2);
  if (a == 0.0 && b == 0.0) return 0.0;
  if (b == 0.0 || c == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = std::max(a / b, b / c);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return a * ratio / (1.0 - ratio);
}

// sum_{n > N} C n^{-s} ~ int_{N+1/2}^inf C x^{-s} dx with C = f(N) N^s.
inline std::optional<cplx> power_sum_tail(cplx f_half, cplx f_full, double n, double hint) {
  if (f_full == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
  double s = std::log(std::abs(f_half) / std::abs(f_full)) / std::log(2.0);
  if (!std::isfinite(s) || s <= 1.0) {
    if (hint > 1.0) {
      s = hint;
    } else {
      return std::nullopt;
    }
  }
  return f_full * std::pow(n, s) * std::pow(n + 0.5, 1.0 - s) / (s - 1.0);
}

}  // namespace detail

/// Sums f(n) over all integers. With tail_exponent_hint <= 0 the terms are
/// assumed to decay geometrically and the tail bound comes from the observed
/// ratio of the outermost terms; with a hint s > 1 a fitted power-law tail is
/// added and the error is the change of the corrected sum under N -> 2N.
inline SumResult bilateral_sum(const TermFunction& f, Tolerance tol, double tail_exponent_hint = 0.0,
                               SumOptions opts = {}) {
  require(tol.abs_tol > 0.0 || tol.rel_tol > 0.0, ErrorKind::invalid_parameter,
          "bilateral_sum: tolerance must be > 0");
  const bool power_law = tail_exponent_hint > 0.0;
  const std::int64_t n0 = opts.fixed_terms.value_or(opts.initial_terms);
  require(n0 >= 2, ErrorKind::invalid_parameter, "bilateral_sum: need at least 2 terms per side");

  // Terms are cached so tail fits can look back without re-evaluating.
  std::vector<cplx> pos{f(0)};
  std::vector<cplx> neg{pos[0]};
  cplx partial = pos[0];
  std::int64_t n = 0;
  const auto extend = [&](std::int64_t upto) {
    for (std::int64_t k = n + 1; k <= upto; ++k) {
      const cplx a = f(k);
      const cplx b = f(-k);
      pos.push_back(a);
      neg.push_back(b);
      partial += a + b;
    }
    n = upto;
  };

  SumResult result;
  const auto idx = [](std::int64_t k) { return static_cast<std::size_t>(k); };
  const auto geometric_bound = [&]() {
    return detail::geometric_side_bound(pos[idx(n)], pos[idx(n - 1)], pos[idx(n - 2)]) +
           detail::geometric_side_bound(neg[idx(n)], neg[idx(n - 1)], neg[idx(n - 2)]);
  };
  const auto power_tail = [&]() -> std::optional<cplx> {
    if (!opts.tail_correction) return cplx(0.0, 0.0);
    const auto tp = detail::power_sum_tail(pos[idx(n / 2)], pos[idx(n)], static_cast<double>(n),
                                           tail_exponent_hint);
    const auto tn = detail::power_sum_tail(neg[idx(n / 2)], neg[idx(n)], static_cast<double>(n),
                                           tail_exponent_hint);
    if (!tp || !tn) return std::nullopt;
    return *tp + *tn;
  };

  extend(n0);
  if (opts.fixed_terms) {
    result.terms_used = 2 * n + 1;
    if (power_law) {
      const auto t = power_tail();
      result.value = partial + t.value_or(cplx(0.0, 0.0));
      result.tail_bound = t ? std::abs(*t) : std::numeric_limits<double>::infinity();
    } else {
      result.value = partial;
      result.tail_bound = geometric_bound();
    }
    result.converged = result.tail_bound <= tol.bound(result.value);
    return result;
  }

  if (!power_law) {
    for (;;) {
      result.value = partial;
      result.tail_bound = geometric_bound();
      result.terms_used = 2 * n + 1;
      if (result.tail_bound <= tol.bound(partial)) {
        result.converged = true;
        break;
      }
      if (2 * n > opts.max_terms) break;
      extend(2 * n);
    }
    return result;
  }

  auto tail = power_tail();
  cplx previous = partial + tail.value_or(cplx(0.0, 0.0));
  bool previous_ok = tail.has_value();
  result.value = previous;
  result.tail_bound = std::numeric_limits<double>::infinity();
  while (2 * n <= opts.max_terms) {
    extend(2 * n);
    tail = power_tail();
    const cplx current = partial + tail.value_or(cplx(0.0, 0.0));
    result.value = current;
    result.terms_used = 2 * n + 1;
    if (tail && previous_ok) {
      result.tail_bound = std::abs(current - previous);
      if (result.tail_bound <= tol.bound(current)) {
        result.converged = true;
        break;
      }
    }
    previous = current;
    previous_ok = tail.has_value();
  }
  return result;
}

}  // namespace lensgamma
