#pragma once

// Checkers for the identities satisfied by the special functions and the
// Boltzmann weights. Each returns a VerificationReport (or several, when an
// identity has independent parts) and never throws for a failed comparison;
// library errors (invalid parameters, poles, non-convergence) propagate.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lensgamma/brackets.hpp"
#include "lensgamma/errors.hpp"
#include "lensgamma/models.hpp"
#include "lensgamma/numerics.hpp"
#include "lensgamma/params.hpp"
#include "lensgamma/products.hpp"
#include "lensgamma/report.hpp"
#include "lensgamma/special_functions.hpp"

namespace lensgamma {

// ---------------------------------------------------------------------------
// Shared pieces

/// Spectral parameters of a star-triangle check, alpha_i + alpha_j + alpha_k = eta.
using Alphas = std::array<double, 3>;
using Spins = std::array<Spin, 3>;

inline ordered_json to_json(const Spin& s) { return ordered_json::array({s.x, s.m}); }

inline ordered_json to_json(const Spins& s) {
  return ordered_json::array({to_json(s[0]), to_json(s[1]), to_json(s[2])});
}

namespace detail {

inline void check_alphas(const Alphas& a, double eta, const char* who) {
  const double sum = a[0] + a[1] + a[2];
  if (std::abs(sum - eta) > 1e-14 * std::max(1.0, std::abs(eta))) {
    raise(ErrorKind::invalid_parameter,
          std::string(who) + ": spectral parameters must sum to eta (|sum - eta| <= 1e-14)");
  }
  for (double x : a) {
    if (!(x > 0.0 && x < eta)) {
      raise(ErrorKind::invalid_parameter, std::string(who) + ": every alpha must lie in (0, eta)");
    }
  }
}

inline void check_tolerance(double tol) {
  require(tol > 0.0 && std::isfinite(tol), ErrorKind::invalid_parameter, "tolerance must be > 0");
}

inline double real_eta(const NomeParameters& np, const char* who) {
  if (!np.physical_regime()) {
    raise(ErrorKind::invalid_parameter,
          std::string(who) + ": requires the physical regime tau = -conj(sigma)");
  }
  return np.eta().real();
}

}  // namespace detail

/// Numerical knobs shared by the quadrature-backed checkers.
struct QuadratureSettings {
  /// Quadrature tolerance as a fraction of tol * |rhs|.
  double quadrature_fraction = 1e-3;
  /// Outer truncation tolerance as a fraction of tol * |rhs|.
  double truncation_fraction = 1e-2;
  PeriodicOptions periodic{};
  LineOptions line{};
  SumOptions sum{};
  TruncationPolicy policy{};
};

// ---------------------------------------------------------------------------
// Star-triangle relation, elliptic model

namespace detail {

inline cplx star_triangle_rhs(const EllipticModel& model, const Spins& s, const Alphas& a,
                              double& tail) {
  const Evaluation w1 = model.weight(a[0], s[1], s[2]);
  const Evaluation w2 = model.weight(a[1], s[0], s[2]);
  const Evaluation w3 = model.weight(a[2], s[1], s[0]);
  tail = w1.tail_bound + w2.tail_bound + w3.tail_bound;
  return w1.value * w2.value * w3.value;
}

}  // namespace detail

/// sum_{m0=0}^{r/2} int_0^pi dx0 S(s0) W_{eta-ai}(si,s0) W_{eta-aj}(sj,s0) W_{eta-ak}(sk,s0)
///   = W_{ai}(sj,sk) W_{aj}(si,sk) W_{ak}(sj,si).
inline VerificationReport verify_str(const Spins& spins, const Alphas& alphas,
                                     const NomeParameters& np, double tol,
                                     const QuadratureSettings& qs = {}) {
  VerificationReport rep;
  rep.identity_name = "str";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    const double eta = detail::real_eta(np, "verify_str");
    detail::check_alphas(alphas, eta, "verify_str");
    for (const Spin& s : spins) {
      require(s.m >= 0 && s.m <= np.r() / 2, ErrorKind::invalid_parameter,
              "verify_str: discrete spins must lie in [0, floor(r/2)]");
    }
    rep.parameters["params"] = to_json(np);
    rep.parameters["spins"] = to_json(spins);
    rep.parameters["alphas"] = ordered_json::array({alphas[0], alphas[1], alphas[2]});
    rep.tolerance = tol;

    const EllipticModel model(np, qs.policy);
    double rhs_tail = 0.0;
    rep.rhs = detail::star_triangle_rhs(model, spins, alphas, rhs_tail);
    const double scale = std::abs(rep.rhs);
    const std::int64_t m_max = np.r() / 2;
    const Tolerance qtol{qs.quadrature_fraction * tol * scale / static_cast<double>(m_max + 1), 0.0};

    cplx lhs{0.0, 0.0};
    double tail = rhs_tail;
    double qerr = 0.0;
    for (std::int64_t m0 = 0; m0 <= m_max; ++m0) {
      const RealIntegrand f = [&](double x0) {
        const Spin s0{x0, m0};
        const Evaluation s = model.single_spin(s0);
        const Evaluation wi = model.weight(eta - alphas[0], spins[0], s0);
        const Evaluation wj = model.weight(eta - alphas[1], spins[1], s0);
        const Evaluation wk = model.weight(eta - alphas[2], spins[2], s0);
        tail = std::max(tail, s.tail_bound + wi.tail_bound + wj.tail_bound + wk.tail_bound + rhs_tail);
        return s.value * wi.value * wj.value * wk.value;
      };
      const QuadratureResult q = periodic_integrate(f, pi, qtol, qs.periodic);
      lhs += q.value;
      qerr += q.error_estimate;
      rep.meta.nodes += q.nodes_used;
      rep.meta.converged = rep.meta.converged && q.converged;
    }
    rep.lhs = lhs;
    rep.meta.truncation = m_max;
    rep.meta.tail_bound = tail;
    rep.meta.quadrature_error = scale > 0.0 ? qerr / scale : qerr;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Star-triangle relation, r -> infinity model

inline VerificationReport verify_rinfstr(const Spins& spins, const Alphas& alphas,
                                         const NomeParameters& np, double tol,
                                         const QuadratureSettings& qs = {}) {
  VerificationReport rep;
  rep.identity_name = "rinfstr";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    const double eta = detail::real_eta(np, "verify_rinfstr");
    detail::check_alphas(alphas, eta, "verify_rinfstr");
    rep.parameters["params"] = to_json(np);
    rep.parameters["spins"] = to_json(spins);
    rep.parameters["alphas"] = ordered_json::array({alphas[0], alphas[1], alphas[2]});
    rep.tolerance = tol;

    const QLimitModel model(np, qs.policy);
    const Evaluation w1 = model.weight(alphas[0], spins[1], spins[2]);
    const Evaluation w2 = model.weight(alphas[1], spins[0], spins[2]);
    const Evaluation w3 = model.weight(alphas[2], spins[1], spins[0]);
    rep.rhs = w1.value * w2.value * w3.value;
    const double scale = std::abs(rep.rhs);
    const Tolerance qtol{qs.quadrature_fraction * tol * scale, 0.0};
    const Tolerance stol{qs.truncation_fraction * tol * scale, 0.0};

    double qerr = 0.0;
    const TermFunction term = [&](std::int64_t m0) -> cplx {
      const RealIntegrand f = [&](double x0) {
        const Spin s0{x0, m0};
        return model.single_spin(s0).value * model.weight(eta - alphas[0], spins[0], s0).value *
               model.weight(eta - alphas[1], spins[1], s0).value *
               model.weight(eta - alphas[2], spins[2], s0).value;
      };
      const QuadratureResult q = periodic_integrate(f, pi, qtol, qs.periodic);
      qerr += q.error_estimate;
      rep.meta.nodes += q.nodes_used;
      rep.meta.converged = rep.meta.converged && q.converged;
      return q.value;
    };
    SumOptions so = qs.sum;
    so.max_terms = std::min<std::int64_t>(so.max_terms, qs.policy.max_sum_terms);
    const SumResult sum = bilateral_sum(term, stol, 0.0, so);
    rep.lhs = sum.value;
    rep.meta.converged = rep.meta.converged && sum.converged;
    rep.meta.truncation = (sum.terms_used - 1) / 2;
    rep.meta.tail_bound = scale > 0.0 ? sum.tail_bound / scale : sum.tail_bound;
    rep.meta.quadrature_error = scale > 0.0 ? qerr / scale : qerr;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Star-triangle relation, gamma-limit model (eta = 1)

/// The integrand over x0 decays like |x0|^{-6} (three crossed weights give
/// |x0|^{-8}, the single-spin weight x0^2), and the m0 terms like |m0|^{-5}.
inline constexpr double strmsg_integrand_decay = 6.0;
inline constexpr double strmsg_sum_decay = 5.0;

inline VerificationReport verify_strmsg(const Spins& spins, const Alphas& alphas, double tol,
                                        const QuadratureSettings& qs = {}) {
  VerificationReport rep;
  rep.identity_name = "strmsg";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    detail::check_alphas(alphas, 1.0, "verify_strmsg");
    rep.parameters["spins"] = to_json(spins);
    rep.parameters["alphas"] = ordered_json::array({alphas[0], alphas[1], alphas[2]});
    rep.parameters["cutoff"] =
        qs.line.fixed_cutoff ? ordered_json(*qs.line.fixed_cutoff) : ordered_json(nullptr);
    rep.parameters["m_cutoff"] =
        qs.sum.fixed_terms ? ordered_json(*qs.sum.fixed_terms) : ordered_json(nullptr);
    rep.tolerance = tol;

    rep.rhs = weight_gamma(alphas[0], spins[1], spins[2]) *
              weight_gamma(alphas[1], spins[0], spins[2]) *
              weight_gamma(alphas[2], spins[1], spins[0]);
    const double scale = std::abs(rep.rhs);
    const Tolerance qtol{qs.quadrature_fraction * tol * scale, 0.0};
    const Tolerance stol{qs.truncation_fraction * tol * scale, 0.0};

    double qerr = 0.0;
    const TermFunction term = [&](std::int64_t m0) -> cplx {
      const RealIntegrand f = [&](double x0) {
        const Spin s0{x0, m0};
        return cplx(single_spin_gamma(s0) * weight_gamma(1.0 - alphas[0], spins[0], s0) *
                        weight_gamma(1.0 - alphas[1], spins[1], s0) *
                        weight_gamma(1.0 - alphas[2], spins[2], s0),
                    0.0);
      };
      const QuadratureResult q = line_integrate(f, qtol, strmsg_integrand_decay, qs.line);
      qerr += q.error_estimate;
      rep.meta.nodes += q.nodes_used;
      rep.meta.converged = rep.meta.converged && q.converged;
      return q.value;
    };
    const SumResult sum = bilateral_sum(term, stol, strmsg_sum_decay, qs.sum);
    rep.lhs = sum.value;
    rep.meta.converged = rep.meta.converged && sum.converged;
    rep.meta.truncation = (sum.terms_used - 1) / 2;
    rep.meta.tail_bound = scale > 0.0 ? sum.tail_bound / scale : sum.tail_bound;
    rep.meta.quadrature_error = scale > 0.0 ? qerr / scale : qerr;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Summation/integration identity

struct MasterParameters {
  std::array<cplx, 6> t{};
  std::array<std::int64_t, 6> u{};
  NomeParameters params = NomeParameters(cplx(0.0, 1.0), cplx(0.0, 1.0), 1);

  /// sum t = 2 i eta (to 1e-14), sum u = 0, Im t_i > 0.
  void validate() const {
    cplx st{0.0, 0.0};
    std::int64_t su = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      st += t[i];
      su += u[i];
      require(t[i].imag() > 0.0, ErrorKind::invalid_parameter,
              "MasterParameters: every Im(t_i) must be positive");
    }
    const cplx target = 2.0 * I * params.eta();
    require(std::abs(st - target) <= 1e-14 * std::max(1.0, std::abs(target)),
            ErrorKind::invalid_parameter, "MasterParameters: sum of t_i must equal 2 i eta");
    require(su == 0, ErrorKind::invalid_parameter, "MasterParameters: sum of u_i must be 0");
  }

  /// Completes a 5-tuple with t_6 = 2 i eta - sum t, u_6 = -sum u.
  static MasterParameters from_five(const std::array<cplx, 5>& t5,
                                    const std::array<std::int64_t, 5>& u5,
                                    const NomeParameters& np) {
    MasterParameters mp;
    mp.params = np;
    cplx a{0.0, 0.0};
    std::int64_t uu = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      mp.t[i] = t5[i];
      mp.u[i] = u5[i];
      a += t5[i];
      uu += u5[i];
    }
    mp.t[5] = 2.0 * I * np.eta() - a;
    mp.u[5] = -uu;
    return mp;
  }
};

inline ordered_json to_json(const MasterParameters& mp) {
  ordered_json j = ordered_json::object();
  j["params"] = to_json(mp.params);
  ordered_json t = ordered_json::array();
  ordered_json u = ordered_json::array();
  for (std::size_t i = 0; i < 6; ++i) {
    t.push_back(to_json(mp.t[i]));
    u.push_back(mp.u[i]);
  }
  j["t"] = t;
  j["u"] = u;
  return j;
}

struct PoleRecord {
  cplx location{0.0, 0.0};
  bool upper = true;   // belongs to the set that must stay above the contour
  std::size_t index = 0;  // which t_i
  std::int64_t y = 0;
  double distance = 0.0;  // signed: positive when on the correct side
};

struct PoleDiagnostics {
  double margin = 0.0;
  std::vector<PoleRecord> nearest;  // sorted by signed distance, at most `keep`
  bool safe(double threshold) const { return margin > threshold; }
};

/// Rejection threshold for the pole margin, as a fraction of eta.
inline constexpr double pole_margin_fraction = 0.05;

/// Poles of the integrand prod_i Gamma(t_i +- z, u_i +- y) / Gamma(+-2z, +-2y)
/// near the real contour. Upper set: t_i + pi sigma (r j + [[u_i - y]]) + 2 i eta k
/// and t_i + pi tau (r(j+1) - [[u_i - y]]) + 2 i eta k; the lower set is its
/// negative with [[u_i + y]]. 1/Gamma(+-2z, +-2y) is entire. The margin is the
/// smallest signed distance of a pole to the real axis (positive = safe).
inline PoleDiagnostics pole_diagnostics(const MasterParameters& mp, std::size_t keep = 12) {
  const NomeParameters& np = mp.params;
  const std::int64_t r = np.r();
  const cplx ps = pi * np.sigma();
  const cplx pt = pi * np.tau();
  const cplx two_i_eta = 2.0 * I * np.eta();
  std::vector<PoleRecord> all;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::int64_t y = 0; y < r; ++y) {
      const double bu = static_cast<double>(mod_bracket(mp.u[i] - y, r));
      const double bl = static_cast<double>(mod_bracket(mp.u[i] + y, r));
      for (std::int64_t j = 0; j < 3; ++j) {
        for (std::int64_t k = 0; k < 3; ++k) {
          const double rj = static_cast<double>(r * j);
          const double kk = static_cast<double>(k);
          const std::array<cplx, 2> up = {mp.t[i] + ps * (rj + bu) + two_i_eta * kk,
                                          mp.t[i] + pt * (rj + static_cast<double>(r) - bu) +
                                              two_i_eta * kk};
          const std::array<cplx, 2> lo = {-mp.t[i] - ps * (rj + bl) - two_i_eta * kk,
                                          -mp.t[i] - pt * (rj + static_cast<double>(r) - bl) -
                                              two_i_eta * kk};
          for (const cplx& z : up) all.push_back({z, true, i, y, z.imag()});
          for (const cplx& z : lo) all.push_back({z, false, i, y, -z.imag()});
        }
      }
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const PoleRecord& a, const PoleRecord& b) { return a.distance < b.distance; });
  PoleDiagnostics d;
  d.margin = all.front().distance;
  all.resize(std::min(keep, all.size()));
  d.nearest = std::move(all);
  return d;
}

namespace detail {

inline void require_safe_contour(const MasterParameters& mp, const char* who) {
  const PoleDiagnostics d = pole_diagnostics(mp, 1);
  const double threshold = pole_margin_fraction * std::abs(mp.params.eta());
  if (!d.safe(threshold)) {
    raise(ErrorKind::contour_violation,
          std::string(who) + ": pole margin " + std::to_string(d.margin) +
              " is below 0.05 eta; the real contour does not separate the pole sets");
  }
}

/// prod_i Gamma(t_i + z, u_i + y) Gamma(t_i - z, u_i - y) / (Gamma(2z, 2y) Gamma(-2z, -2y)).
inline cplx master_integrand(cplx z, std::int64_t y, const MasterParameters& mp,
                             const TruncationPolicy& policy, double& tail) {
  LogProduct prod;
  for (std::size_t i = 0; i < 6; ++i) {
    prod.combine(lens_gamma_log(mp.t[i] + z, mp.u[i] + y, mp.params, policy, false), false);
    prod.combine(lens_gamma_log(mp.t[i] - z, mp.u[i] - y, mp.params, policy, false), false);
  }
  prod.combine(lens_gamma_log(2.0 * z, 2 * y, mp.params, policy, true), false);
  prod.combine(lens_gamma_log(-2.0 * z, -2 * y, mp.params, policy, true), false);
  tail = std::max(tail, prod.tail());
  return prod.evaluate().value;
}

inline cplx pochhammer_r_product(const NomeParameters& np, const TruncationPolicy& policy) {
  const double r = static_cast<double>(np.r());
  const cplx pr = np.nome_p(r);
  const cplx qr = np.nome_q(r);
  return qpochhammer_inf(qr, qr, policy).value * qpochhammer_inf(pr, pr, policy).value;
}

struct MasterSides {
  cplx lhs{0.0, 0.0};
  cplx rhs{1.0, 0.0};
  double tail = 0.0;
  double quadrature_error = 0.0;  // absolute, on lhs
  std::int64_t nodes = 0;
  bool converged = true;
};

inline MasterSides master_sides(const MasterParameters& mp, double tol, const QuadratureSettings& qs) {
  MasterSides out;
  const NomeParameters& np = mp.params;
  LogProduct rhs;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      rhs.combine(lens_gamma_log(mp.t[i] + mp.t[j], mp.u[i] + mp.u[j], np, qs.policy, false), false);
    }
  }
  out.rhs = rhs.evaluate().value;
  out.tail = rhs.tail();
  const cplx prefactor = pochhammer_r_product(np, qs.policy) / (4.0 * pi);
  const double r = static_cast<double>(np.r());
  const double scale = std::abs(out.rhs) / std::abs(prefactor);
  const Tolerance qtol{qs.quadrature_fraction * tol * scale / r, 0.0};
  cplx total{0.0, 0.0};
  double qerr = 0.0;
  for (std::int64_t y = 0; y < np.r(); ++y) {
    const RealIntegrand f = [&](double z) { return master_integrand(z, y, mp, qs.policy, out.tail); };
    const QuadratureResult q = periodic_integrate(f, 2.0 * pi, qtol, qs.periodic);
    total += q.value;
    qerr += q.error_estimate;
    out.nodes += q.nodes_used;
    out.converged = out.converged && q.converged;
  }
  out.lhs = prefactor * total;
  out.quadrature_error = std::abs(prefactor) * qerr;
  return out;
}

}  // namespace detail

/// (q^r;q^r)(p^r;p^r) sum_y int_0^{2pi} dz/(4pi) prod_i Gamma(t_i +- z, u_i +- y) / Gamma(+-2z, +-2y)
///   = prod_{i<j} Gamma(t_i + t_j, u_i + u_j).
/// Raises contour_violation (without integrating) when the pole margin is too small.
inline VerificationReport verify_master(const MasterParameters& mp, double tol,
                                        const QuadratureSettings& qs = {}) {
  VerificationReport rep;
  rep.identity_name = "master";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    mp.validate();
    rep.parameters = to_json(mp);
    rep.tolerance = tol;
    detail::require_safe_contour(mp, "verify_master");
    const detail::MasterSides s = detail::master_sides(mp, tol, qs);
    rep.lhs = s.lhs;
    rep.rhs = s.rhs;
    const double scale = std::abs(s.rhs);
    rep.meta.nodes = s.nodes;
    rep.meta.truncation = mp.params.r();
    rep.meta.tail_bound = s.tail;
    rep.meta.quadrature_error = scale > 0.0 ? s.quadrature_error / scale : s.quadrature_error;
    rep.meta.converged = s.converged;
    rep.details["pole_margin"] = pole_diagnostics(mp, 1).margin;
  }
  rep.finalize();
  return rep;
}

/// Master parameters that reproduce the elliptic star-triangle relation:
/// nomes squared, and for each outer spin l = i, j, k the pair
///   (t, u) = (2 x_l + 2 i alpha_l, -m_l), (-2 x_l + 2 i alpha_l, m_l).
/// The integration variables map as z = 2 x0, y = -m0.
inline MasterParameters star_triangle_master_parameters(const Spins& spins, const Alphas& alphas,
                                                        const NomeParameters& np) {
  MasterParameters mp;
  mp.params = np.squared();
  for (std::size_t l = 0; l < 3; ++l) {
    mp.t[2 * l] = 2.0 * spins[l].x + 2.0 * I * alphas[l];
    mp.t[2 * l + 1] = -2.0 * spins[l].x + 2.0 * I * alphas[l];
    mp.u[2 * l] = -spins[l].m;
    mp.u[2 * l + 1] = spins[l].m;
  }
  return mp;
}

/// Evaluates the star-triangle relation through the summation/integration
/// identity. Both sides of the master identity equal the corresponding
/// star-triangle sides times prod_l kappa(eta - alpha_l); the report holds the
/// rescaled sides so they can be compared with verify_str directly.
inline VerificationReport verify_str_via_master(const Spins& spins, const Alphas& alphas,
                                                const NomeParameters& np, double tol,
                                                const QuadratureSettings& qs = {}) {
  VerificationReport rep;
  rep.identity_name = "str_via_master";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    const double eta = detail::real_eta(np, "verify_str_via_master");
    detail::check_alphas(alphas, eta, "verify_str_via_master");
    const MasterParameters mp = star_triangle_master_parameters(spins, alphas, np);
    mp.validate();
    rep.parameters["params"] = to_json(np);
    rep.parameters["spins"] = to_json(spins);
    rep.parameters["alphas"] = ordered_json::array({alphas[0], alphas[1], alphas[2]});
    rep.parameters["master"] = to_json(mp);
    rep.tolerance = tol;
    detail::require_safe_contour(mp, "verify_str_via_master");
    const EllipticModel model(np, qs.policy);
    cplx norm{1.0, 0.0};
    for (double a : alphas) norm *= model.kappa(eta - a).value;
    const detail::MasterSides s = detail::master_sides(mp, tol, qs);
    rep.lhs = s.lhs / norm;
    rep.rhs = s.rhs / norm;
    const double scale = std::abs(s.rhs);
    rep.meta.nodes = s.nodes;
    rep.meta.truncation = mp.params.r();
    rep.meta.tail_bound = s.tail;
    rep.meta.quadrature_error = scale > 0.0 ? s.quadrature_error / scale : s.quadrature_error;
    rep.meta.converged = s.converged;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Constant form of the identity

using FiveT = std::array<cplx, 5>;
using FiveU = std::array<std::int64_t, 5>;

namespace detail {

struct IntegralValue {
  cplx value{0.0, 0.0};
  double tail = 0.0;
  double quadrature_error = 0.0;
  std::int64_t nodes = 0;
  bool converged = true;
};

/// I = sum_y int_0^{2pi} rho(z, y) dz with
/// rho = prod_i Gamma(t_i +- z, u_i +- y) Gamma(A - t_i, U - u_i)
///       / (Gamma(+-2z, +-2y) Gamma(A +- z, U +- y) prod_{i<j} Gamma(t_i + t_j, u_i + u_j)).
inline IntegralValue integral_I(const FiveT& t, const FiveU& u, const NomeParameters& np,
                                const Tolerance& qtol, const QuadratureSettings& qs) {
  const TruncationPolicy& pol = qs.policy;
  cplx a{0.0, 0.0};
  std::int64_t uu = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    a += t[i];
    uu += u[i];
  }
  LogProduct constant;
  for (std::size_t i = 0; i < 5; ++i) {
    constant.combine(lens_gamma_log(a - t[i], uu - u[i], np, pol, false), false);
    for (std::size_t j = i + 1; j < 5; ++j) {
      constant.combine(lens_gamma_log(t[i] + t[j], u[i] + u[j], np, pol, true), false);
    }
  }
  IntegralValue out;
  out.tail = constant.tail();
  const cplx log_c = constant.log_sum();
  for (std::int64_t y = 0; y < np.r(); ++y) {
    const RealIntegrand f = [&](double zr) {
      const cplx z(zr, 0.0);
      LogProduct prod;
      for (std::size_t i = 0; i < 5; ++i) {
        prod.combine(lens_gamma_log(t[i] + z, u[i] + y, np, pol, false), false);
        prod.combine(lens_gamma_log(t[i] - z, u[i] - y, np, pol, false), false);
      }
      prod.combine(lens_gamma_log(2.0 * z, 2 * y, np, pol, true), false);
      prod.combine(lens_gamma_log(-2.0 * z, -2 * y, np, pol, true), false);
      prod.combine(lens_gamma_log(a + z, uu + y, np, pol, true), false);
      prod.combine(lens_gamma_log(a - z, uu - y, np, pol, true), false);
      prod.add_log(log_c);
      out.tail = std::max(out.tail, prod.tail() + constant.tail());
      return prod.evaluate().value;
    };
    const QuadratureResult q = periodic_integrate(f, 2.0 * pi, qtol, qs.periodic);
    out.value += q.value;
    out.quadrature_error += q.error_estimate;
    out.nodes += q.nodes_used;
    out.converged = out.converged && q.converged;
  }
  return out;
}

inline void fill_I_meta(VerificationReport& rep, const IntegralValue& v, double scale,
                        std::int64_t r) {
  rep.meta.nodes += v.nodes;
  rep.meta.truncation = r;
  rep.meta.tail_bound = std::max(rep.meta.tail_bound, v.tail);
  rep.meta.quadrature_error += scale > 0.0 ? v.quadrature_error / scale : v.quadrature_error;
  rep.meta.converged = rep.meta.converged && v.converged;
}

}  // namespace detail

/// Two reports: I(t, u) = 4 pi / ((q^r;q^r)(p^r;p^r)), and invariance of I
/// under t_1 -> t_1 + pi sigma, u_1 -> u_1 - 1. Both configurations must pass
/// the pole-margin check.
inline std::vector<VerificationReport> verify_I_constant(const FiveT& t, const FiveU& u,
                                                         const NomeParameters& np, double tol,
                                                         double shift_tol,
                                                         const QuadratureSettings& qs = {}) {
  detail::check_tolerance(tol);
  detail::check_tolerance(shift_tol);
  const MasterParameters base = MasterParameters::from_five(t, u, np);
  FiveT ts = t;
  FiveU us = u;
  ts[0] += pi * np.sigma();
  us[0] -= 1;
  const MasterParameters shifted = MasterParameters::from_five(ts, us, np);
  for (std::size_t i = 0; i < 5; ++i) {
    require(t[i].imag() > 0.0, ErrorKind::invalid_parameter,
            "verify_I_constant: every Im(t_i) must be positive");
  }
  cplx a{0.0, 0.0};
  for (const cplx& x : t) a += x;
  require(std::abs(a.imag()) < std::abs((2.0 * I * np.eta()).imag()), ErrorKind::invalid_parameter,
          "verify_I_constant: |Im A| must be below |Im 2 i eta|");
  detail::require_safe_contour(base, "verify_I_constant");
  detail::require_safe_contour(shifted, "verify_I_constant (shifted)");

  ordered_json params = ordered_json::object();
  params["params"] = to_json(np);
  ordered_json tj = ordered_json::array();
  ordered_json uj = ordered_json::array();
  for (std::size_t i = 0; i < 5; ++i) {
    tj.push_back(to_json(t[i]));
    uj.push_back(u[i]);
  }
  params["t"] = tj;
  params["u"] = uj;

  const cplx constant = 4.0 * pi / detail::pochhammer_r_product(np, qs.policy);
  const double scale = std::abs(constant);
  const Tolerance qtol{qs.quadrature_fraction * std::min(tol, shift_tol) * scale /
                           static_cast<double>(np.r()),
                       0.0};

  VerificationReport rep;
  rep.identity_name = "I_constant";
  rep.parameters = params;
  rep.tolerance = tol;
  VerificationReport shift;
  shift.identity_name = "I_shift";
  shift.parameters = params;
  shift.tolerance = shift_tol;
  {
    ScopedTimer timer(rep.meta);
    const detail::IntegralValue v = detail::integral_I(t, u, np, qtol, qs);
    rep.lhs = v.value;
    rep.rhs = constant;
    detail::fill_I_meta(rep, v, scale, np.r());
    rep.details["pole_margin"] = pole_diagnostics(base, 1).margin;
  }
  {
    ScopedTimer timer(shift.meta);
    const detail::IntegralValue v = detail::integral_I(ts, us, np, qtol, qs);
    shift.lhs = v.value;
    shift.rhs = rep.lhs;
    detail::fill_I_meta(shift, v, scale, np.r());
    shift.meta.converged = shift.meta.converged && rep.meta.converged;
    shift.details["pole_margin"] = pole_diagnostics(shifted, 1).margin;
  }
  rep.finalize();
  shift.finalize();
  return {rep, shift};
}

// ---------------------------------------------------------------------------
// Theta-function difference identity

struct ThetaSides {
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
};

namespace detail {

inline cplx theta_nonzero(cplx z, std::int64_t m, const NomeParameters& np,
                          const TruncationPolicy& policy) {
  const cplx v = lens_theta(z, m, np, policy).value;
  if (std::abs(v) < pole_threshold) {
    raise(ErrorKind::pole_hit, "theta difference identity: a denominator theta vanishes");
  }
  return v;
}

}  // namespace detail

/// Both sides of the difference equation of the integrand divided by the integrand:
///   theta(t1+z,u1+y) theta(t1-z,u1-y) / (theta(A+z,U+y) theta(A-z,U-y))
///     prod_{i>=2} theta(A-t_i,U-u_i)/theta(t1+t_i,u1+u_i) - 1
///   = -e^{i t1/r} theta(t1+A,u1+U)/prod_{i>=2} theta(t1+t_i,u1+u_i) (a(z) + b(z)).
inline ThetaSides theta_difference_sides(cplx z, std::int64_t y, const FiveT& t, const FiveU& u,
                                         const NomeParameters& np,
                                         const TruncationPolicy& policy = {}) {
  const std::int64_t r = np.r();
  const double rr = static_cast<double>(r);
  const auto th = [&](cplx a, std::int64_t m) { return lens_theta(a, m, np, policy).value; };
  const auto th_den = [&](cplx a, std::int64_t m) { return detail::theta_nonzero(a, m, np, policy); };
  cplx a{0.0, 0.0};
  std::int64_t uu = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    a += t[i];
    uu += u[i];
  }
  ThetaSides s;
  cplx lhs = th(t[0] + z, u[0] + y) * th(t[0] - z, u[0] - y) /
             (th_den(a + z, uu + y) * th_den(a - z, uu - y));
  cplx den{1.0, 0.0};
  for (std::size_t i = 1; i < 5; ++i) {
    const cplx d = th_den(t[0] + t[i], u[0] + u[i]);
    lhs *= th(a - t[i], uu - u[i]) / d;
    den *= d;
  }
  s.lhs = lhs - 1.0;

  const cplx pre = -std::exp(I * t[0] / rr) * th(t[0] + a, u[0] + uu) / den;
  cplx ta = std::exp(-I * z / rr + 2.0 * I * pi * static_cast<double>(mod_bracket(y - u[0], r)) / rr);
  cplx tb = std::exp(I * z / rr +
                     2.0 * I * pi *
                         static_cast<double>(mod_bracket(y - u[0] + 1, r) + mod_bracket(-2 * y - 1, r)) /
                         rr);
  for (std::size_t i = 0; i < 5; ++i) {
    ta *= th(t[i] + z, u[i] + y);
    tb *= th(t[i] - z, u[i] - y);
  }
  ta /= th_den(2.0 * z, 2 * y) * th_den(a + z, uu + y);
  tb /= th_den(-2.0 * z, -2 * y) * th_den(a - z, uu - y);
  s.rhs = pre * (ta + tb);
  return s;
}

/// Three reports: the identity at z, invariance of the left side under
/// z -> z + pi tau r, and invariance of the right side under the same shift.
inline std::vector<VerificationReport> verify_theta_difference(cplx z, std::int64_t y, const FiveT& t,
                                                               const FiveU& u,
                                                               const NomeParameters& np, double tol,
                                                               const TruncationPolicy& policy = {}) {
  detail::check_tolerance(tol);
  ordered_json params = ordered_json::object();
  params["params"] = to_json(np);
  params["z"] = to_json(z);
  params["y"] = y;
  ordered_json tj = ordered_json::array();
  ordered_json uj = ordered_json::array();
  for (std::size_t i = 0; i < 5; ++i) {
    tj.push_back(to_json(t[i]));
    uj.push_back(u[i]);
  }
  params["t"] = tj;
  params["u"] = uj;

  VerificationReport main;
  VerificationReport left;
  VerificationReport right;
  main.identity_name = "theta_difference";
  left.identity_name = "theta_difference_lhs_shift";
  right.identity_name = "theta_difference_rhs_shift";
  for (VerificationReport* rep : {&main, &left, &right}) {
    rep->parameters = params;
    rep->tolerance = tol;
  }
  {
    ScopedTimer timer(main.meta);
    const ThetaSides s = theta_difference_sides(z, y, t, u, np, policy);
    const ThetaSides sh =
        theta_difference_sides(z + pi * np.tau() * static_cast<double>(np.r()), y, t, u, np, policy);
    main.lhs = s.lhs;
    main.rhs = s.rhs;
    left.lhs = sh.lhs;
    left.rhs = s.lhs;
    right.lhs = sh.rhs;
    right.rhs = s.rhs;
  }
  left.meta.runtime_seconds = right.meta.runtime_seconds = main.meta.runtime_seconds;
  main.finalize();
  left.finalize();
  right.finalize();
  return {main, left, right};
}

// ---------------------------------------------------------------------------
// Relation between the two lens gamma conventions (diagnostic)

/// Compares Phi_{r,m}(z) with e^{-varphi'(w, m)} Gamma'(w, m), w = -2z + i eta',
/// where primes denote squared nomes (eta' = 2 eta). Never gates acceptance.
inline VerificationReport verify_gamma_phi_bridge(cplx z, std::int64_t m, const NomeParameters& np,
                                                  double tol, const TruncationPolicy& policy = {}) {
  VerificationReport rep;
  rep.identity_name = "gamma_phi_bridge";
  rep.gate = false;
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    rep.parameters["params"] = to_json(np);
    rep.parameters["z"] = to_json(z);
    rep.parameters["m"] = m;
    rep.tolerance = tol;
    const NomeParameters sq = np.squared();
    const cplx w = -2.0 * z + I * sq.eta();
    const Evaluation phi = lens_elliptic_gamma(z, m, np, policy);
    const Evaluation gam = lens_gamma_appendix(w, m, sq, policy);
    rep.lhs = phi.value;
    rep.rhs = std::exp(-varphi(w, m, sq)) * gam.value;
    rep.meta.tail_bound = phi.tail_bound + gam.tail_bound;
    rep.meta.truncation = std::max(phi.max_j, gam.max_j);
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Modular bracket identities

/// Exhaustive integer check of the six bracket identities for r in [1, r_max],
/// m in [-3r, 3r]. lhs = number of failures, rhs = 0.
inline VerificationReport verify_bracket_identities(std::int64_t r_max) {
  VerificationReport rep;
  rep.identity_name = "brackets";
  {
    ScopedTimer timer(rep.meta);
    require(r_max >= 1, ErrorKind::invalid_parameter, "verify_bracket_identities: r_max must be >= 1");
    rep.parameters["r_max"] = r_max;
    rep.tolerance = 0.0;
    std::int64_t failures = 0;
    std::int64_t checked = 0;
    ordered_json counterexamples = ordered_json::array();
    for (std::int64_t r = 1; r <= r_max; ++r) {
      const auto b = [r](std::int64_t k) { return mod_bracket(k, r); };
      const auto pm = [r](std::int64_t k) { return bracket_pm(k, r); };
      for (std::int64_t m = -3 * r; m <= 3 * r; ++m) {
        const std::array<bool, 6> ok = {
            pm(m) == pm(-m),
            b(-m) + b(m - 1) == r - 1,
            pm(m - 1) - pm(m) + 2 * b(-m) == r - 1,
            pm(m + 1) - pm(m) + 2 * b(m) == r - 1,
            (2 * b(m) - r) * pm(m) - (2 * b(m - 1) - r) * pm(m - 1) ==
                -(r - 1) * (r - 2) - 6 * b(-m) + 6 * pm(m),
            (2 * b(m) - r) * pm(m) - (2 * b(m + 1) - r) * pm(m + 1) ==
                (r - 1) * (r - 2) + 6 * b(m) - 6 * pm(-m)};
        for (std::size_t i = 0; i < ok.size(); ++i) {
          ++checked;
          if (!ok[i]) {
            ++failures;
            if (counterexamples.size() < 20) {
              counterexamples.push_back(ordered_json::array({i + 1, r, m}));
            }
          }
        }
      }
    }
    rep.lhs = cplx(static_cast<double>(failures), 0.0);
    rep.rhs = cplx(0.0, 0.0);
    rep.meta.truncation = checked;
    rep.details["checked"] = checked;
    rep.details["counterexamples"] = counterexamples;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Limits

/// Non-increase within this absolute slack counts as a decrease.
inline constexpr double monotone_slack = 1e-14;

namespace detail {

/// Largest increase along the sequence (0 when strictly decreasing).
inline double max_increase(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] - v[i - 1]);
  return worst;
}

inline ordered_json to_json_list(const std::vector<double>& v) {
  ordered_json j = ordered_json::array();
  for (double x : v) j.push_back(x);
  return j;
}

}  // namespace detail

/// |Phi_{r,n}(z) - Q(z, n)| must decrease along r_list. lhs is the largest
/// increase (0 when strictly decreasing), rhs = 0, tolerance = 1e-14.
inline VerificationReport verify_limit_r_to_inf(cplx z, std::int64_t n, const NomeParameters& np,
                                                const std::vector<std::int64_t>& r_list,
                                                const TruncationPolicy& policy = {}) {
  VerificationReport rep;
  rep.identity_name = "limit_r";
  {
    ScopedTimer timer(rep.meta);
    require(!r_list.empty(), ErrorKind::invalid_parameter, "verify_limit_r_to_inf: empty r list");
    rep.parameters["params"] = to_json(np);
    rep.parameters["z"] = to_json(z);
    rep.parameters["n"] = n;
    ordered_json rl = ordered_json::array();
    for (auto r : r_list) rl.push_back(r);
    rep.parameters["r_list"] = rl;
    rep.tolerance = monotone_slack;
    const Evaluation q = q_function(z, n, np, policy);
    std::vector<double> errors;
    for (std::int64_t r : r_list) {
      const Evaluation phi = lens_elliptic_gamma(z, n, np.with_r(r), policy);
      errors.push_back(std::abs(phi.value - q.value));
      rep.meta.truncation = std::max(rep.meta.truncation, phi.max_j);
    }
    rep.lhs = cplx(detail::max_increase(errors), 0.0);
    rep.rhs = cplx(0.0, 0.0);
    rep.details["errors"] = detail::to_json_list(errors);
  }
  rep.finalize();
  return rep;
}

/// Deviations from 1 of the small-hbar asymptotic ratios (p = q = e^{-hbar}):
///   Q(hbar x, m) (4 hbar)^{-ix} Gamma((1+|m|-ix)/2) / Gamma((1+|m|+ix)/2)
///   kappa(alpha hbar) / [(8 hbar)^{-alpha} Gamma((1-alpha)/2) / Gamma((1+alpha)/2)]
///   S(hbar x, m) / [(4 hbar)^2 (x^2 + m^2) / (2 pi)]        (skipped at x = m = 0)
/// must shrink along hbar_list. lhs is the largest increase over the three
/// sequences, rhs = 0, tolerance = 1e-14.
inline VerificationReport verify_limit_hbar(double alpha, double x, std::int64_t m,
                                            const std::vector<double>& hbar_list,
                                            const TruncationPolicy& policy = {}) {
  VerificationReport rep;
  rep.identity_name = "limit_hbar";
  {
    ScopedTimer timer(rep.meta);
    require(!hbar_list.empty(), ErrorKind::invalid_parameter, "verify_limit_hbar: empty hbar list");
    for (std::size_t i = 0; i < hbar_list.size(); ++i) {
      require(hbar_list[i] > 0.0 && (i == 0 || hbar_list[i] < hbar_list[i - 1]),
              ErrorKind::invalid_parameter, "verify_limit_hbar: hbar values must be positive and decreasing");
    }
    rep.parameters["alpha"] = alpha;
    rep.parameters["x"] = x;
    rep.parameters["m"] = m;
    rep.parameters["hbar_list"] = detail::to_json_list(hbar_list);
    rep.tolerance = monotone_slack;
    const double am = static_cast<double>(m < 0 ? -m : m);
    const bool with_s = x != 0.0 || m != 0;
    std::vector<double> dq;
    std::vector<double> dk;
    std::vector<double> ds;
    for (double h : hbar_list) {
      const NomeParameters np(cplx(0.0, h / pi), cplx(0.0, h / pi), 1);
      const QLimitModel model(np, policy);
      const cplx q = q_function(h * x, m, np, policy).value;
      const cplx q_asym = std::exp(I * x * std::log(4.0 * h) + log_gamma(cplx(0.5 * (1.0 + am), 0.5 * x)) -
                                   log_gamma(cplx(0.5 * (1.0 + am), -0.5 * x)));
      dq.push_back(std::abs(q / q_asym - 1.0));
      const cplx k = model.kappa(alpha * h).value;
      const cplx k_asym = std::exp(-alpha * std::log(8.0 * h) + log_gamma(0.5 * (1.0 - alpha)) -
                                   log_gamma(0.5 * (1.0 + alpha)));
      dk.push_back(std::abs(k / k_asym - 1.0));
      if (with_s) {
        const cplx s = model.single_spin(Spin{h * x, m}).value;
        const double s_asym = (4.0 * h) * (4.0 * h) * (x * x + am * am) / (2.0 * pi);
        ds.push_back(std::abs(s / s_asym - 1.0));
      }
    }
    const double worst =
        std::max({detail::max_increase(dq), detail::max_increase(dk), detail::max_increase(ds)});
    rep.lhs = cplx(worst, 0.0);
    rep.rhs = cplx(0.0, 0.0);
    rep.details["q_deviation"] = detail::to_json_list(dq);
    rep.details["kappa_deviation"] = detail::to_json_list(dk);
    rep.details["single_spin_deviation"] = detail::to_json_list(ds);
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Local identities of the weights

/// W_alpha(si, sj) W_{-alpha}(si, sj) = 1.
inline VerificationReport verify_inversion_first(ModelFamily family, double alpha, Spin si, Spin sj,
                                                 const NomeParameters& np, double tol,
                                                 const TruncationPolicy& policy = {}) {
  VerificationReport rep;
  rep.identity_name = "inversion";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    rep.parameters["family"] = std::string(to_string(family));
    if (family != ModelFamily::gamma_limit) rep.parameters["params"] = to_json(np);
    rep.parameters["alpha"] = alpha;
    rep.parameters["spins"] = ordered_json::array({to_json(si), to_json(sj)});
    rep.tolerance = tol;
    switch (family) {
      case ModelFamily::elliptic: {
        const EllipticModel model(np, policy);
        const Evaluation a = model.weight(alpha, si, sj);
        const Evaluation b = model.weight(-alpha, si, sj);
        rep.lhs = a.value * b.value;
        rep.meta.tail_bound = a.tail_bound + b.tail_bound;
        break;
      }
      case ModelFamily::qlimit: {
        const QLimitModel model(np, policy);
        const Evaluation a = model.weight(alpha, si, sj);
        const Evaluation b = model.weight(-alpha, si, sj);
        rep.lhs = a.value * b.value;
        rep.meta.tail_bound = a.tail_bound + b.tail_bound;
        break;
      }
      case ModelFamily::gamma_limit:
        rep.lhs = weight_gamma(alpha, si, sj) * weight_gamma(-alpha, si, sj);
        break;
    }
    rep.rhs = cplx(1.0, 0.0);
  }
  rep.finalize();
  return rep;
}

/// Two reports: kappa(eta - alpha) / kappa(alpha) = Phi_{r,0}(i(eta - 2 alpha))
/// (Q(i(eta - 2 alpha), 0) for the q-limit family) and kappa(alpha) kappa(-alpha) = 1.
inline std::vector<VerificationReport> verify_kappa(ModelFamily family, double alpha,
                                                    const NomeParameters& np, double tol,
                                                    const TruncationPolicy& policy = {}) {
  require(family != ModelFamily::gamma_limit, ErrorKind::invalid_parameter,
          "verify_kappa: only the elliptic and q-limit families have kappa series");
  detail::check_tolerance(tol);
  VerificationReport ratio;
  VerificationReport inv;
  ratio.identity_name = "kappa_crossing";
  inv.identity_name = "kappa_inversion";
  for (VerificationReport* rep : {&ratio, &inv}) {
    rep->parameters["family"] = std::string(to_string(family));
    rep->parameters["params"] = to_json(np);
    rep->parameters["alpha"] = alpha;
    rep->tolerance = tol;
  }
  {
    ScopedTimer timer(ratio.meta);
    const cplx eta = np.eta();
    Evaluation k_a;
    Evaluation k_c;
    Evaluation k_m;
    Evaluation f;
    if (family == ModelFamily::elliptic) {
      const EllipticModel model(np, policy);
      k_a = model.kappa(alpha);
      k_c = model.kappa(eta - alpha);
      k_m = model.kappa(-alpha);
      f = lens_elliptic_gamma(I * (eta - 2.0 * alpha), 0, np, policy);
    } else {
      const QLimitModel model(np, policy);
      k_a = model.kappa(alpha);
      k_c = model.kappa(eta - alpha);
      k_m = model.kappa(-alpha);
      f = q_function(I * (eta - 2.0 * alpha), 0, np, policy);
    }
    ratio.lhs = k_c.value / k_a.value;
    ratio.rhs = f.value;
    ratio.meta.tail_bound = k_c.tail_bound + k_a.tail_bound + f.tail_bound;
    ratio.meta.truncation = std::max(k_a.max_j, k_c.max_j);
    inv.lhs = k_a.value * k_m.value;
    inv.rhs = cplx(1.0, 0.0);
    inv.meta.tail_bound = k_a.tail_bound + k_m.tail_bound;
    inv.meta.truncation = std::max(k_a.max_j, k_m.max_j);
  }
  inv.meta.runtime_seconds = ratio.meta.runtime_seconds;
  ratio.finalize();
  inv.finalize();
  return {ratio, inv};
}

/// The lens-gamma and theta_4 forms of the elliptic single-spin weight agree.
inline VerificationReport verify_single_spin_forms(Spin s, const NomeParameters& np, double tol,
                                                   const TruncationPolicy& policy = {}) {
  VerificationReport rep;
  rep.identity_name = "single_spin_forms";
  {
    ScopedTimer timer(rep.meta);
    detail::check_tolerance(tol);
    rep.parameters["params"] = to_json(np);
    rep.parameters["spin"] = to_json(s);
    rep.tolerance = tol;
    const EllipticModel model(np, policy);
    const Evaluation a = model.single_spin(s);
    const Evaluation b = model.single_spin_theta(s);
    rep.lhs = a.value;
    rep.rhs = b.value;
    rep.meta.tail_bound = a.tail_bound + b.tail_bound;
    rep.meta.truncation = std::max(a.max_j, b.max_j);
  }
  rep.finalize();
  return rep;
}

}  // namespace lensgamma
