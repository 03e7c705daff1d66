#pragma once

// Boltzmann weights of the three Ising-type models:
//
//   Elliptic    edge weights built from Phi_{r,m}, spins (x, m), 0 <= m <= r/2
//   QLimit      r -> infinity limit built from Q(z, n), m in Z
//   GammaLimit  Euler-gamma weights, x in R, m in Z, eta = 1
//
// The elliptic and q-limit models are classes so that kappa(alpha), which is
// spin independent and dominates repeated evaluation, is cached per instance.
// A model instance is not meant to be shared between threads; every worker
// builds its own. Free functions are provided for one-off evaluations.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>

#include "lensgamma/brackets.hpp"
#include "lensgamma/errors.hpp"
#include "lensgamma/log_gamma.hpp"
#include "lensgamma/numerics.hpp"
#include "lensgamma/params.hpp"
#include "lensgamma/products.hpp"
#include "lensgamma/special_functions.hpp"

namespace lensgamma {

struct Spin {
  double x = 0.0;
  std::int64_t m = 0;
};

enum class ModelFamily { elliptic, qlimit, gamma_limit };

inline std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::elliptic:
      return "elliptic";
    case ModelFamily::qlimit:
      return "qlimit";
    case ModelFamily::gamma_limit:
      return "gamma_limit";
  }
  return "unknown";
}

/// True when p = conj(q) and alpha is real with 0 < alpha < eta.
inline bool physical_regime(cplx alpha, const NomeParameters& np) {
  return np.physical_regime() && alpha.imag() == 0.0 && alpha.real() > 0.0 &&
         alpha.real() < np.eta().real();
}

/// 1/2 when 2m = 0 (mod r), otherwise 1. Requires 0 <= m <= floor(r/2).
inline double epsilon_factor(std::int64_t m, std::int64_t r) {
  require(r >= 1, ErrorKind::invalid_parameter, "epsilon_factor: r must be >= 1");
  require(m >= 0 && m <= r / 2, ErrorKind::invalid_parameter,
          "epsilon_factor: m must lie in [0, floor(r/2)]");
  return (2 * m) % r == 0 ? 0.5 : 1.0;
}

namespace detail {

// log kappa = sum_{n >= 1} g(n) [e^{2n log(pq) + 4 alpha n} - e^{2n log(pq) - 4 alpha n}].
// The summand at -n is minus the summand at n with alpha -> -alpha, which is
// how the bilateral sum is written here; evaluating exponents before
// exponentiating keeps every term finite for alpha anywhere in (-eta, eta).
template <class Weight>
Evaluation kappa_series(cplx alpha, const NomeParameters& np, const TruncationPolicy& policy,
                        Weight&& g) {
  policy.validate();
  const cplx lpq = np.log_p() + np.log_q();
  const TermFunction term = [&](std::int64_t n) -> cplx {
    if (n == 0) return cplx(0.0, 0.0);
    const double k = static_cast<double>(n > 0 ? n : -n);
    const cplx sign_alpha = n > 0 ? alpha : -alpha;
    const cplx e = std::exp(2.0 * k * lpq + 4.0 * sign_alpha * k);
    const cplx value = e * g(static_cast<std::int64_t>(k));
    return n > 0 ? value : -value;
  };
  SumOptions opts;
  opts.max_terms = policy.max_sum_terms;
  const SumResult sum = bilateral_sum(term, Tolerance{policy.term_epsilon, 0.0}, 0.0, opts);
  if (!sum.converged) {
    raise(ErrorKind::non_convergence,
          "kappa: bilateral sum did not converge (alpha outside the convergence strip?)");
  }
  Evaluation e;
  e.value = std::exp(sum.value);
  e.tail_bound = sum.tail_bound;
  e.max_j = sum.terms_used;
  return e;
}

struct KappaKey {
  double re;
  double im;
  bool operator<(const KappaKey& o) const { return re < o.re || (re == o.re && im < o.im); }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Elliptic model

class EllipticModel {
 public:
  explicit EllipticModel(NomeParameters np, TruncationPolicy policy = {})
      : np_(np), policy_(policy) {
    policy_.validate();
  }

  const NomeParameters& params() const { return np_; }
  const TruncationPolicy& policy() const { return policy_; }

  /// Normalisation kappa(alpha); converges for |Re alpha| < eta.
  Evaluation kappa(cplx alpha) const {
    const detail::KappaKey key{alpha.real(), alpha.imag()};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double r = static_cast<double>(np_.r());
    const cplx lp = np_.log_p();
    const cplx lq = np_.log_q();
    const auto g = [&](std::int64_t n) {
      const double k = static_cast<double>(n);
      const cplx x2r = std::exp(k * r * (lp + lq));  // (pq)^{rn}
      const cplx x4 = std::exp(4.0 * k * (lp + lq));
      const cplx p2r = std::exp(2.0 * k * r * lp);
      const cplx q2r = std::exp(2.0 * k * r * lq);
      return (1.0 - x2r * x2r) / (k * (1.0 - x4) * (1.0 - p2r) * (1.0 - q2r));
    };
    Evaluation e = detail::kappa_series(alpha, np_, policy_, g);
    cache_.emplace(key, e);
    return e;
  }

  /// Edge weight W_alpha(si, sj).
  Evaluation weight(cplx alpha, Spin si, Spin sj) const {
    const std::int64_t r = np_.r();
    const std::int64_t dm = si.m - sj.m;
    const std::int64_t sm = si.m + sj.m;
    const double dx = si.x - sj.x;
    const double sx = si.x + sj.x;
    LogProduct prod;
    prod.combine(detail::lens_elliptic_gamma_log(dx + I * alpha, dm, np_, policy_, false), false);
    prod.combine(detail::lens_elliptic_gamma_log(sx + I * alpha, sm, np_, policy_, false), false);
    prod.combine(detail::lens_elliptic_gamma_log(dx - I * alpha, dm, np_, policy_, true), false);
    prod.combine(detail::lens_elliptic_gamma_log(sx - I * alpha, sm, np_, policy_, true), false);
    const Evaluation k = kappa(alpha);
    prod.add_log(-2.0 * alpha * static_cast<double>(bracket_pm(dm, r) + bracket_pm(sm, r)) /
                 static_cast<double>(r));
    prod.add_log(-std::log(k.value));
    prod.add_tail(k.tail_bound);
    return prod.evaluate();
  }

  /// Single-spin weight, lens-gamma product form:
  ///   eps/pi (p^{2r};p^{2r}) (q^{2r};q^{2r}) e^{2 eta [[2m]]_pm / r}
  ///   Phi_{r,-2m}(-2x - i eta) Phi_{r,2m}(2x - i eta).
  Evaluation single_spin(Spin s) const {
    const std::int64_t r = np_.r();
    const double rr = static_cast<double>(r);
    const double eps = epsilon_factor(s.m, r);
    const cplx eta = np_.eta();
    const cplx p2r = std::exp(2.0 * rr * np_.log_p());
    const cplx q2r = std::exp(2.0 * rr * np_.log_q());
    LogProduct prod;
    single_product(prod, p2r, p2r, FactorRole::numerator, policy_);
    single_product(prod, q2r, q2r, FactorRole::numerator, policy_);
    prod.combine(detail::lens_elliptic_gamma_log(-2.0 * s.x - I * eta, -2 * s.m, np_, policy_, false),
                 false);
    prod.combine(detail::lens_elliptic_gamma_log(2.0 * s.x - I * eta, 2 * s.m, np_, policy_, false),
                 false);
    prod.add_log(2.0 * eta * static_cast<double>(bracket_pm(2 * s.m, r)) / rr);
    prod.add_log(std::log(eps / pi));
    return prod.evaluate();
  }

  /// Single-spin weight, theta_4 form:
  ///   eps/pi e^{2 eta [[2m]]_pm / r} theta_4(2x + (r/2 - [[2m]]) pi sigma | p^r)
  ///                                  theta_4(2x - (r/2 - [[2m]]) pi tau | q^r).
  Evaluation single_spin_theta(Spin s) const {
    const std::int64_t r = np_.r();
    const double rr = static_cast<double>(r);
    const double eps = epsilon_factor(s.m, r);
    const double shift = rr / 2.0 - static_cast<double>(mod_bracket(2 * s.m, r));
    const Evaluation a = theta4(2.0 * s.x + shift * pi * np_.sigma(), np_.nome_p(rr), policy_);
    const Evaluation b = theta4(2.0 * s.x - shift * pi * np_.tau(), np_.nome_q(rr), policy_);
    Evaluation e;
    e.value = eps / pi * std::exp(2.0 * np_.eta() * static_cast<double>(bracket_pm(2 * s.m, r)) / rr) *
              a.value * b.value;
    e.tail_bound = a.tail_bound + b.tail_bound;
    e.max_j = std::max(a.max_j, b.max_j);
    return e;
  }

 private:
  NomeParameters np_;
  TruncationPolicy policy_;
  mutable std::map<detail::KappaKey, Evaluation> cache_;
};

inline Evaluation kappa_elliptic(cplx alpha, const NomeParameters& np,
                                 const TruncationPolicy& policy = {}) {
  return EllipticModel(np, policy).kappa(alpha);
}

inline Evaluation weight_elliptic(cplx alpha, Spin si, Spin sj, const NomeParameters& np,
                                  const TruncationPolicy& policy = {}) {
  return EllipticModel(np, policy).weight(alpha, si, sj);
}

inline Evaluation single_spin_elliptic(Spin s, const NomeParameters& np,
                                       const TruncationPolicy& policy = {}) {
  return EllipticModel(np, policy).single_spin(s);
}

inline Evaluation single_spin_elliptic_theta(Spin s, const NomeParameters& np,
                                             const TruncationPolicy& policy = {}) {
  return EllipticModel(np, policy).single_spin_theta(s);
}

// ---------------------------------------------------------------------------
// r -> infinity model

namespace detail {

inline LogProduct q_function_log(cplx z, std::int64_t n, const NomeParameters& np,
                                 const TruncationPolicy& policy, bool reciprocal) {
  const cplx lp = np.log_p();
  const cplx lq = np.log_q();
  const cplx a = std::exp(2.0 * (lp + lq));
  const double nn = static_cast<double>(n);
  // n >= 0: numerator e^{2iz} q^{2n} (pq)^{2j+1}, denominator e^{-2iz} p^{2n} (pq)^{2j+1}
  // n <  0: numerator e^{2iz} p^{-2n} (pq)^{2j+1}, denominator e^{-2iz} q^{-2n} (pq)^{2j+1}
  const cplx top_log = 2.0 * I * z + (n >= 0 ? 2.0 * nn * lq : -2.0 * nn * lp) + lp + lq;
  const cplx bottom_log = -2.0 * I * z + (n >= 0 ? 2.0 * nn * lp : -2.0 * nn * lq) + lp + lq;
  const auto top = reciprocal ? FactorRole::denominator : FactorRole::numerator;
  const auto bottom = reciprocal ? FactorRole::numerator : FactorRole::denominator;
  LogProduct num;
  LogProduct den;
  single_product(num, std::exp(top_log), a, top, policy);
  single_product(den, std::exp(bottom_log), a, bottom, policy);
  if (reciprocal) {
    den.combine(num, true);
    return den;
  }
  num.combine(den, true);
  return num;
}

}  // namespace detail

/// Q(z, n), the r -> infinity limit of Phi_{r,n}(z).
inline Evaluation q_function(cplx z, std::int64_t n, const NomeParameters& np,
                             const TruncationPolicy& policy = {}) {
  policy.validate();
  return detail::q_function_log(z, n, np, policy, false).evaluate();
}

class QLimitModel {
 public:
  explicit QLimitModel(NomeParameters np, TruncationPolicy policy = {}) : np_(np), policy_(policy) {
    policy_.validate();
  }

  const NomeParameters& params() const { return np_; }
  const TruncationPolicy& policy() const { return policy_; }

  /// kappa(alpha) = exp(-sum_{n != 0} e^{4 alpha n} / (n ((pq)^{2n} - (pq)^{-2n}))).
  Evaluation kappa(cplx alpha) const {
    const detail::KappaKey key{alpha.real(), alpha.imag()};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const cplx lpq = np_.log_p() + np_.log_q();
    const auto g = [&](std::int64_t n) {
      const double k = static_cast<double>(n);
      return 1.0 / (k * (1.0 - std::exp(4.0 * k * lpq)));
    };
    Evaluation e = detail::kappa_series(alpha, np_, policy_, g);
    cache_.emplace(key, e);
    return e;
  }

  Evaluation weight(cplx alpha, Spin si, Spin sj) const {
    const std::int64_t dm = si.m - sj.m;
    const std::int64_t sm = si.m + sj.m;
    const double dx = si.x - sj.x;
    const double sx = si.x + sj.x;
    LogProduct prod;
    prod.combine(detail::q_function_log(dx + I * alpha, dm, np_, policy_, false), false);
    prod.combine(detail::q_function_log(sx + I * alpha, sm, np_, policy_, false), false);
    prod.combine(detail::q_function_log(dx - I * alpha, dm, np_, policy_, true), false);
    prod.combine(detail::q_function_log(sx - I * alpha, sm, np_, policy_, true), false);
    const Evaluation k = kappa(alpha);
    prod.add_log(-2.0 * alpha * static_cast<double>(std::abs(dm) + std::abs(sm)));
    prod.add_log(-std::log(k.value));
    prod.add_tail(k.tail_bound);
    return prod.evaluate();
  }

  /// (1/2pi) e^{4 eta |m|} Q(2x - i eta, 2m) Q(-2x - i eta, -2m).
  Evaluation single_spin(Spin s) const {
    const cplx eta = np_.eta();
    LogProduct prod;
    prod.combine(detail::q_function_log(2.0 * s.x - I * eta, 2 * s.m, np_, policy_, false), false);
    prod.combine(detail::q_function_log(-2.0 * s.x - I * eta, -2 * s.m, np_, policy_, false), false);
    prod.add_log(4.0 * eta * static_cast<double>(std::abs(s.m)) - std::log(2.0 * pi));
    return prod.evaluate();
  }

 private:
  NomeParameters np_;
  TruncationPolicy policy_;
  mutable std::map<detail::KappaKey, Evaluation> cache_;
};

inline Evaluation kappa_qlimit(cplx alpha, const NomeParameters& np,
                               const TruncationPolicy& policy = {}) {
  return QLimitModel(np, policy).kappa(alpha);
}

inline Evaluation weight_qlimit(cplx alpha, Spin si, Spin sj, const NomeParameters& np,
                                const TruncationPolicy& policy = {}) {
  return QLimitModel(np, policy).weight(alpha, si, sj);
}

inline Evaluation single_spin_qlimit(Spin s, const NomeParameters& np,
                                     const TruncationPolicy& policy = {}) {
  return QLimitModel(np, policy).single_spin(s);
}

// ---------------------------------------------------------------------------
// Gamma-limit model (eta = 1)

namespace detail {

// log of Gamma((1 - a + |M| + iX)/2) Gamma((1 - a + |M| - iX)/2)
//        / (Gamma((1 + a + |M| + iX)/2) Gamma((1 + a + |M| - iX)/2)).
// Using |M| instead of -M leaves the ratio unchanged (reflection formula) and
// keeps every argument in the right half plane for |a| < 1.
inline cplx gamma_pair_log(double a, std::int64_t m, double x) {
  const double mm = static_cast<double>(m < 0 ? -m : m);
  const cplx lo_p(0.5 * (1.0 - a + mm), 0.5 * x);
  const cplx hi_p(0.5 * (1.0 + a + mm), 0.5 * x);
  return log_gamma(lo_p) + log_gamma(std::conj(lo_p)) - log_gamma(hi_p) - log_gamma(std::conj(hi_p));
}

}  // namespace detail

/// Euler-gamma edge weight
///   Gamma((1+a)/2)/Gamma((1-a)/2) prod_{M,X} Gamma((1-a-M +- iX)/2)/Gamma((1+a-M +- iX)/2)
/// over (M, X) = (mi+mj, xi+xj), (mi-mj, xi-xj).
inline double weight_gamma(double alpha, Spin si, Spin sj) {
  // The four +-iX pairs are |Gamma|^2 ratios and hence positive; only the real
  // prefactor Gamma((1+a)/2)/Gamma((1-a)/2) can carry a sign (for |a| > 1).
  const double a1 = 0.5 * (1.0 + alpha);
  const double a2 = 0.5 * (1.0 - alpha);
  const cplx log_w = log_gamma(cplx(a1, 0.0)) - log_gamma(cplx(a2, 0.0)) +
                     detail::gamma_pair_log(alpha, si.m + sj.m, si.x + sj.x) +
                     detail::gamma_pair_log(alpha, si.m - sj.m, si.x - sj.x);
  const bool negative = (std::tgamma(a1) < 0.0) != (std::tgamma(a2) < 0.0);
  const double magnitude = std::exp(log_w.real());
  return negative ? -magnitude : magnitude;
}

/// (x^2 + m^2) / (4 pi).
inline double single_spin_gamma(Spin s) {
  const double m = static_cast<double>(s.m);
  return (s.x * s.x + m * m) / (4.0 * pi);
}

// ---------------------------------------------------------------------------
// Crossing

/// W_{eta - alpha}(si, sj); eta = 1 for the gamma-limit family.
inline cplx crossing_weight(ModelFamily family, cplx alpha, Spin si, Spin sj,
                            const NomeParameters& np, const TruncationPolicy& policy = {}) {
  switch (family) {
    case ModelFamily::elliptic:
      return weight_elliptic(np.eta() - alpha, si, sj, np, policy).value;
    case ModelFamily::qlimit:
      return weight_qlimit(np.eta() - alpha, si, sj, np, policy).value;
    case ModelFamily::gamma_limit:
      return weight_gamma(1.0 - alpha.real(), si, sj);
  }
  raise(ErrorKind::invalid_parameter, "crossing_weight: unknown family");
}

}  // namespace lensgamma
