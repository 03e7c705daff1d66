#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "lensgamma/errors.hpp"

namespace lensgamma {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Elliptic moduli and lens order shared by every function in the library.
///
/// The nomes are p = exp(i pi sigma) and q = exp(i pi tau). Powers of the
/// nomes are always formed from sigma/tau directly (see nome_p / nome_q), so
/// fractional or large exponents never go through a complex logarithm.
class NomeParameters {
 public:
  NomeParameters(cplx sigma, cplx tau, std::int64_t r) : sigma_(sigma), tau_(tau), r_(r) {
    require(sigma.imag() > 0.0 && tau.imag() > 0.0, ErrorKind::divergent_parameter,
            "NomeParameters: Im(sigma) and Im(tau) must be positive");
    require(r >= 1, ErrorKind::invalid_parameter, "NomeParameters: lens order r must be >= 1");
  }

  /// Physical-regime parameters sigma = a + ib, tau = -a + ib, so p = conj(q)
  /// and eta = pi b.
  static NomeParameters physical(double a, double b, std::int64_t r) {
    return NomeParameters(cplx(a, b), cplx(-a, b), r);
  }

  cplx sigma() const noexcept { return sigma_; }
  cplx tau() const noexcept { return tau_; }
  std::int64_t r() const noexcept { return r_; }

  cplx p() const { return std::exp(I * pi * sigma_); }
  cplx q() const { return std::exp(I * pi * tau_); }
  /// p^x for real or complex x, evaluated as exp(i pi sigma x).
  cplx nome_p(cplx x) const { return std::exp(I * pi * sigma_ * x); }
  cplx nome_q(cplx x) const { return std::exp(I * pi * tau_ * x); }
  /// log p and log q on the branch fixed by sigma and tau.
  cplx log_p() const { return I * pi * sigma_; }
  cplx log_q() const { return I * pi * tau_; }

  /// Crossing parameter; exp(-2 eta) = p q.
  cplx eta() const { return -I * pi * (sigma_ + tau_) / 2.0; }
  cplx zeta() const { return I * pi * (1.0 + tau_ / 2.0 - sigma_ / 2.0); }

  /// tau == -conj(sigma), up to rounding in the inputs.
  bool physical_regime() const {
    return std::abs(tau_ + std::conj(sigma_)) <= 1e-14 * (1.0 + std::abs(sigma_));
  }

  NomeParameters with_r(std::int64_t r) const { return NomeParameters(sigma_, tau_, r); }
  /// p -> p^2, q -> q^2.
  NomeParameters squared() const { return NomeParameters(2.0 * sigma_, 2.0 * tau_, r_); }

 private:
  cplx sigma_;
  cplx tau_;
  std::int64_t r_;
};

/// Controls truncation of infinite products and bilateral sums.
struct TruncationPolicy {
  double term_epsilon = 1e-16;
  std::int64_t max_product_index = 10000;
  std::int64_t max_sum_terms = 10000;

  void validate() const {
    require(term_epsilon > 0.0 && term_epsilon < 1.0, ErrorKind::invalid_parameter,
            "TruncationPolicy: term_epsilon must lie in (0, 1)");
    require(max_product_index >= 1 && max_sum_terms >= 1, ErrorKind::invalid_parameter,
            "TruncationPolicy: caps must be >= 1");
  }
};

/// A special-function value with its truncation bookkeeping.
///
/// tail_bound bounds |log(exact) - log(value)|, i.e. it is a bound on the
/// relative error caused by dropping factors. max_j / max_k are the deepest
/// product indices that were retained.
struct Evaluation {
  cplx value{1.0, 0.0};
  double tail_bound = 0.0;
  std::int64_t max_j = 0;
  std::int64_t max_k = 0;
};

}  // namespace lensgamma
