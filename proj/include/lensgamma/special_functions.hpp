#pragma once

// Theta functions, the elliptic gamma function and the two conventions of the
// lens elliptic gamma function:
//
//   Phi_{r,m}(z)  double product in e^{+-2iz} with nomes p, q (weights)
//   Gamma(z, m)   double product in e^{+-iz} with prefactor e^{varphi(z,m)}
//                 (summation/integration identity)
//
// Every function returns an Evaluation carrying the truncation tail bound.

#include <cstdint>

#include "lensgamma/brackets.hpp"
#include "lensgamma/params.hpp"
#include "lensgamma/products.hpp"

namespace lensgamma {

/// (x; q)_inf = prod_{j>=0} (1 - x q^j).
inline Evaluation qpochhammer_inf(cplx x, cplx q, const TruncationPolicy& policy = {}) {
  policy.validate();
  LogProduct prod;
  single_product(prod, x, q, FactorRole::numerator, policy);
  return prod.evaluate();
}

/// Jacobi theta_4(z | p) in product form.
inline Evaluation theta4(cplx z, cplx p, const TruncationPolicy& policy = {}) {
  policy.validate();
  detail::check_nome(p, "theta4");
  const cplx p2 = p * p;
  LogProduct prod;
  single_product(prod, p2, p2, FactorRole::numerator, policy);
  single_product(prod, std::exp(2.0 * I * z) * p, p2, FactorRole::numerator, policy);
  single_product(prod, std::exp(-2.0 * I * z) * p, p2, FactorRole::numerator, policy);
  return prod.evaluate();
}

/// Phi(z; p, q) = prod_{j,k} (1 - e^{2iz} p^{2j+1} q^{2k+1}) / (1 - e^{-2iz} p^{2j+1} q^{2k+1}).
inline Evaluation elliptic_gamma(cplx z, cplx p, cplx q, const TruncationPolicy& policy = {}) {
  policy.validate();
  detail::check_nome(p, "elliptic_gamma");
  detail::check_nome(q, "elliptic_gamma");
  const cplx pq = p * q;
  LogProduct num;
  LogProduct den;
  double_product(num, std::exp(2.0 * I * z) * pq, p * p, q * q, FactorRole::numerator, policy);
  double_product(den, std::exp(-2.0 * I * z) * pq, p * p, q * q, FactorRole::denominator, policy);
  num.combine(den, true);
  return num.evaluate();
}

namespace detail {

inline LogProduct lens_elliptic_gamma_log(cplx z, std::int64_t m, const NomeParameters& np,
                                          const TruncationPolicy& policy, bool reciprocal) {
  const std::int64_t r = np.r();
  const double mm = static_cast<double>(mod_bracket(m, r));
  const double rr = static_cast<double>(r);
  const cplx lp = np.log_p();
  const cplx lq = np.log_q();
  const cplx ab = std::exp(2.0 * (lp + lq));
  const cplx pr2 = std::exp(2.0 * rr * lp);
  const cplx qr2 = std::exp(2.0 * rr * lq);
  const auto top = reciprocal ? FactorRole::denominator : FactorRole::numerator;
  const auto bottom = reciprocal ? FactorRole::numerator : FactorRole::denominator;

  LogProduct num;
  LogProduct den;
  double_product(num, std::exp(2.0 * I * z + lp * (1.0 + 2.0 * rr - 2.0 * mm) + lq), ab, pr2, top,
                 policy);
  double_product(num, std::exp(2.0 * I * z + lq * (1.0 + 2.0 * mm) + lp), ab, qr2, top, policy);
  double_product(den, std::exp(-2.0 * I * z + lp * (1.0 + 2.0 * mm) + lq), ab, pr2, bottom,
                 policy);
  double_product(den, std::exp(-2.0 * I * z + lq * (1.0 + 2.0 * rr - 2.0 * mm) + lp), ab, qr2,
                 bottom, policy);
  if (reciprocal) {
    den.combine(num, true);
    return den;
  }
  num.combine(den, true);
  return num;
}

}  // namespace detail

/// Lens elliptic gamma function Phi_{r,m}(z) (explicit double product form).
/// Depends on m only through [[m]]_r.
inline Evaluation lens_elliptic_gamma(cplx z, std::int64_t m, const NomeParameters& np,
                                      const TruncationPolicy& policy = {}) {
  policy.validate();
  return detail::lens_elliptic_gamma_log(z, m, np, policy, false).evaluate();
}

/// 1 / Phi_{r,m}(z); zeros of Phi_{r,m} are poles here and vice versa.
inline Evaluation reciprocal_lens_elliptic_gamma(cplx z, std::int64_t m, const NomeParameters& np,
                                                 const TruncationPolicy& policy = {}) {
  policy.validate();
  return detail::lens_elliptic_gamma_log(z, m, np, policy, true).evaluate();
}

/// Exponent prefactor of Gamma(z, m):
///   (-2 eta - 2 i z + 2 zeta ([[m]] - [[-m]]) / 3) [[m]]_pm / (4 r).
inline cplx varphi(cplx z, std::int64_t m, const NomeParameters& np) {
  const std::int64_t r = np.r();
  const double diff = static_cast<double>(mod_bracket(m, r) - mod_bracket(-m, r));
  const double pm = static_cast<double>(bracket_pm(m, r));
  return (-2.0 * np.eta() - 2.0 * I * z + 2.0 * np.zeta() * diff / 3.0) * pm /
         (4.0 * static_cast<double>(r));
}

namespace detail {

inline LogProduct lens_gamma_log(cplx z, std::int64_t m, const NomeParameters& np,
                                 const TruncationPolicy& policy, bool reciprocal) {
  const std::int64_t r = np.r();
  const double mm = static_cast<double>(mod_bracket(m, r));
  const double rr = static_cast<double>(r);
  const cplx lp = np.log_p();
  const cplx lq = np.log_q();
  const cplx pq = std::exp(lp + lq);
  const cplx pr = std::exp(rr * lp);
  const cplx qr = std::exp(rr * lq);
  const auto top = reciprocal ? FactorRole::denominator : FactorRole::numerator;
  const auto bottom = reciprocal ? FactorRole::numerator : FactorRole::denominator;

  LogProduct num;
  LogProduct den;
  // p^{-[[m]]} (pq)^{j+1} p^{r(k+1)}  and  q^{-r+[[m]]} (pq)^{j+1} q^{r(k+1)}
  double_product(num, std::exp(-I * z + lp * (1.0 + rr - mm) + lq), pq, pr, top, policy);
  double_product(num, std::exp(-I * z + lq * (1.0 + mm) + lp), pq, qr, top, policy);
  // p^{[[m]]} (pq)^j p^{rk}  and  q^{r-[[m]]} (pq)^j q^{rk}
  double_product(den, std::exp(I * z + lp * mm), pq, pr, bottom, policy);
  double_product(den, std::exp(I * z + lq * (rr - mm)), pq, qr, bottom, policy);

  const cplx prefactor = varphi(z, m, np);
  if (reciprocal) {
    den.combine(num, true);
    den.add_log(-prefactor);
    return den;
  }
  num.combine(den, true);
  num.add_log(prefactor);
  return num;
}

}  // namespace detail

/// Lens elliptic gamma function Gamma(z, m) = e^{varphi(z,m)} x (double product).
/// Poles: z = -pi sigma (r j + [[m]]) - 2 i eta k and -pi tau (r(j+1) - [[m]]) - 2 i eta k.
inline Evaluation lens_gamma_appendix(cplx z, std::int64_t m, const NomeParameters& np,
                                      const TruncationPolicy& policy = {}) {
  policy.validate();
  return detail::lens_gamma_log(z, m, np, policy, false).evaluate();
}

/// 1 / Gamma(z, m), finite (possibly zero) at the poles of Gamma.
inline Evaluation reciprocal_lens_gamma(cplx z, std::int64_t m, const NomeParameters& np,
                                        const TruncationPolicy& policy = {}) {
  policy.validate();
  return detail::lens_gamma_log(z, m, np, policy, true).evaluate();
}

/// Closed-form exponent of the lens theta function:
///   (zeta (r-1)(r+1)/3 - i pi (tau + 2) [[m]]_pm - i (z + pi)(r - 1 - 2 [[-m]])) / (2r).
inline cplx theta_exponent(cplx z, std::int64_t m, const NomeParameters& np) {
  const double r = static_cast<double>(np.r());
  const double pm = static_cast<double>(bracket_pm(m, np.r()));
  const double neg = static_cast<double>(mod_bracket(-m, np.r()));
  return (np.zeta() * (r - 1.0) * (r + 1.0) / 3.0 - I * pi * (np.tau() + 2.0) * pm -
          I * (z + pi) * (r - 1.0 - 2.0 * neg)) /
         (2.0 * r);
}

/// theta(z, m | tau) = e^{phi(z,m)} (e^{iz} q^{[[-m]]}; q^r)_inf (e^{-iz} q^{r-[[-m]]}; q^r)_inf.
inline Evaluation lens_theta(cplx z, std::int64_t m, const NomeParameters& np,
                             const TruncationPolicy& policy = {}) {
  policy.validate();
  const double rr = static_cast<double>(np.r());
  const double neg = static_cast<double>(mod_bracket(-m, np.r()));
  const cplx lq = np.log_q();
  const cplx qr = std::exp(rr * lq);
  LogProduct prod;
  single_product(prod, std::exp(I * z + lq * neg), qr, FactorRole::numerator, policy);
  single_product(prod, std::exp(-I * z + lq * (rr - neg)), qr, FactorRole::numerator, policy);
  prod.add_log(theta_exponent(z, m, np));
  return prod.evaluate();
}

/// theta(z | tau) = (e^{iz}; q^r)_inf (e^{-iz} q^r; q^r)_inf.
inline Evaluation theta_std(cplx z, const NomeParameters& np, const TruncationPolicy& policy = {}) {
  policy.validate();
  const cplx qr = std::exp(static_cast<double>(np.r()) * np.log_q());
  LogProduct prod;
  single_product(prod, std::exp(I * z), qr, FactorRole::numerator, policy);
  single_product(prod, std::exp(-I * z) * qr, qr, FactorRole::numerator, policy);
  return prod.evaluate();
}

}  // namespace lensgamma
