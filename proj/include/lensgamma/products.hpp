#pragma once

// Truncated infinite products of the form
//   prod_{j>=0} (1 - c a^j)            and
//   prod_{j,k>=0} (1 - c a^j b^k),      |a|, |b| < 1,
// accumulated with an explicit bound on the discarded tail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "lensgamma/errors.hpp"
#include "lensgamma/params.hpp"

namespace lensgamma {

/// A factor closer to zero than this inside a denominator is a pole hit.
inline constexpr double pole_threshold = 1e-13;

enum class FactorRole { numerator, denominator };

/// Running log of a product of factors (1 - w).
///
/// Factors are multiplied into a scratch value that is folded into log_sum
/// whenever its magnitude leaves [1e-100, 1e100], so the final value never
/// under- or overflows even when individual factors are large. An exact zero
/// factor sets `zero` instead of producing -inf.
class LogProduct {
 public:
  void multiply(cplx w, FactorRole role) {
    const cplx factor = 1.0 - w;
    if (role == FactorRole::denominator && std::abs(factor) < pole_threshold) {
      raise(ErrorKind::pole_hit, "denominator factor vanishes (|1 - w| < 1e-13)");
    }
    if (factor == cplx(0.0, 0.0)) {
      zero_ = true;
      return;
    }
    scratch_ *= factor;
    const double mag = std::abs(scratch_);
    if (mag > 1e100 || mag < 1e-100) fold();
  }

  /// Adds (or, with invert, subtracts) another product's logarithm.
  void combine(const LogProduct& other, bool invert) {
    if (invert && other.zero_) raise(ErrorKind::pole_hit, "division by a vanishing product");
    const cplx other_log = other.log_sum();
    log_sum_ += invert ? -other_log : other_log;
    zero_ = zero_ || other.zero_;
    tail_ += other.tail_;
    max_j_ = std::max(max_j_, other.max_j_);
    max_k_ = std::max(max_k_, other.max_k_);
  }

  void add_log(cplx x) { log_sum_ += x; }
  void add_tail(double t) { tail_ += t; }
  void note_depth(std::int64_t j, std::int64_t k) {
    max_j_ = std::max(max_j_, j);
    max_k_ = std::max(max_k_, k);
  }

  cplx log_sum() const { return log_sum_ + std::log(scratch_); }
  bool is_zero() const { return zero_; }
  double tail() const { return tail_; }

  Evaluation evaluate() const {
    Evaluation e;
    e.value = zero_ ? cplx(0.0, 0.0) : std::exp(log_sum());
    e.tail_bound = tail_;
    e.max_j = max_j_;
    e.max_k = max_k_;
    return e;
  }

  /// Value of the reciprocal; a vanishing product is a pole of it.
  Evaluation evaluate_reciprocal() const {
    if (zero_) raise(ErrorKind::pole_hit, "reciprocal of a vanishing product");
    Evaluation e = evaluate();
    e.value = std::exp(-log_sum());
    return e;
  }

 private:
  void fold() {
    log_sum_ += std::log(scratch_);
    scratch_ = cplx(1.0, 0.0);
  }

  cplx log_sum_{0.0, 0.0};
  cplx scratch_{1.0, 0.0};
  bool zero_ = false;
  double tail_ = 0.0;
  std::int64_t max_j_ = 0;
  std::int64_t max_k_ = 0;
};

namespace detail {

inline void check_nome(cplx a, const char* what) {
  if (!(std::abs(a) < 1.0)) raise(ErrorKind::divergent_parameter, std::string(what) + ": |nome| >= 1");
}

// |log(1 - w)| <= |w| / (1 - |w|) for |w| < 1, summed over a geometric run.
inline double geometric_log_tail(double first, double ratio) {
  return first / ((1.0 - ratio) * (1.0 - first));
}

}  // namespace detail

/// Multiplies prod_{j>=0} (1 - c a^j) into `out`.
inline void single_product(LogProduct& out, cplx c, cplx a, FactorRole role,
                           const TruncationPolicy& policy) {
  detail::check_nome(a, "single_product");
  const double ratio = std::abs(a);
  cplx w = c;
  for (std::int64_t j = 0;; ++j) {
    const double mag = std::abs(w);
    if (mag < policy.term_epsilon) {
      out.add_tail(detail::geometric_log_tail(mag, ratio));
      out.note_depth(j, 0);
      return;
    }
    if (j >= policy.max_product_index) {
      raise(ErrorKind::non_convergence, "single_product: index cap reached before term_epsilon");
    }
    out.multiply(w, role);
    w *= a;
  }
}

/// Multiplies prod_{j,k>=0} (1 - c a^j b^k) into `out`. Row j stops at the
/// first k with |c a^j b^k| < term_epsilon; rows stop once |c a^j| does.
inline void double_product(LogProduct& out, cplx c, cplx a, cplx b, FactorRole role,
                           const TruncationPolicy& policy) {
  detail::check_nome(a, "double_product");
  detail::check_nome(b, "double_product");
  const double ra = std::abs(a);
  const double rb = std::abs(b);
  cplx row = c;
  for (std::int64_t j = 0;; ++j) {
    const double row_mag = std::abs(row);
    if (row_mag < policy.term_epsilon) {
      out.add_tail(row_mag / ((1.0 - ra) * (1.0 - rb) * (1.0 - row_mag)));
      out.note_depth(j, 0);
      return;
    }
    if (j >= policy.max_product_index) {
      raise(ErrorKind::non_convergence, "double_product: row cap reached before term_epsilon");
    }
    cplx w = row;
    for (std::int64_t k = 0;; ++k) {
      const double mag = std::abs(w);
      if (mag < policy.term_epsilon) {
        out.add_tail(detail::geometric_log_tail(mag, rb));
        out.note_depth(j, k);
        break;
      }
      if (k >= policy.max_product_index) {
        raise(ErrorKind::non_convergence, "double_product: column cap reached before term_epsilon");
      }
      out.multiply(w, role);
      w *= b;
    }
    row *= a;
  }
}

}  // namespace lensgamma
