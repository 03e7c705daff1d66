#include <gtest/gtest.h>

#include "test_support.hpp"

namespace lensgamma {
namespace {

using testing::Draw;
using testing::rel_err;

const NomeParameters physical = NomeParameters::physical(0.05, 0.5, 1);

using lcplx = std::complex<long double>;

lcplx widen(cplx z) { return {z.real(), z.imag()}; }

// Summand of log kappa exactly as the normalisation is written, evaluated
// naively in extended precision (the large powers cancel), elliptic family.
lcplx kappa_summand_elliptic(double alpha, std::int64_t n, const NomeParameters& np) {
  const long double k = static_cast<long double>(n);
  const long double r = static_cast<long double>(np.r());
  const lcplx lp = widen(np.log_p());
  const lcplx lq = widen(np.log_q());
  const auto diff = [](lcplx x) { return std::exp(x) - std::exp(-x); };
  return std::exp(4.0L * alpha * k) * diff(r * k * (lp + lq)) /
         (k * diff(2.0L * k * (lp + lq)) * diff(r * k * lp) * diff(r * k * lq));
}

// r -> infinity limit of the elliptic summand: (pq)^{rn} / (p^{rn} q^{rn}) terms
// tend to -sign(n), giving -e^{4 alpha n} / (|n| ((pq)^{2n} - (pq)^{-2n})).
// (Written with n instead of |n|, the summand would be even in n at alpha = 0
// and kappa(0) = 1 would fail.)
lcplx kappa_summand_qlimit(double alpha, std::int64_t n, const NomeParameters& np) {
  const long double k = static_cast<long double>(n);
  const lcplx lpq = widen(np.log_p() + np.log_q());
  return -std::exp(4.0L * alpha * k) / (std::abs(k) * (std::exp(2.0L * k * lpq) - std::exp(-2.0L * k * lpq)));
}

template <class Summand>
cplx naive_kappa(double alpha, const NomeParameters& np, Summand summand, std::int64_t nmax) {
  lcplx s{0.0L, 0.0L};
  for (std::int64_t n = 1; n <= nmax; ++n) s += summand(alpha, n, np) + summand(alpha, -n, np);
  const lcplx v = std::exp(s);
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

/// Q(z, n) from its single product, 200 factors.
cplx brute_q(cplx z, std::int64_t n, const NomeParameters& np) {
  const cplx p = np.p();
  const cplx q = np.q();
  const cplx top = n >= 0 ? testing::pow_int(q, 2 * n) : testing::pow_int(p, -2 * n);
  const cplx bottom = n >= 0 ? testing::pow_int(p, 2 * n) : testing::pow_int(q, -2 * n);
  cplx out{1.0, 0.0};
  for (int j = 0; j < 200; ++j) {
    const cplx pq = testing::pow_int(p * q, 2 * j + 1);
    out *= (1.0 - std::exp(2.0 * I * z) * top * pq) / (1.0 - std::exp(-2.0 * I * z) * bottom * pq);
  }
  return out;
}

Spin random_elliptic_spin(Draw& d, std::int64_t r) { return {d.real(0.0, pi), d.integer(0, r / 2)}; }

void expect_real_positive(cplx v, const std::string& what) {
  EXPECT_GT(v.real(), 0.0) << what;
  EXPECT_LE(std::abs(v.imag()), 1e-12 * std::abs(v)) << what;
}

// ---------------------------------------------------------------------------
// epsilon factor

TEST(EpsilonFactor, Examples) {
  EXPECT_EQ(epsilon_factor(0, 5), 0.5);
  EXPECT_EQ(epsilon_factor(2, 4), 0.5);
  EXPECT_EQ(epsilon_factor(1, 5), 1.0);
}

TEST(EpsilonFactor, RejectsSpinOutsideDomain) {
  EXPECT_THROW(epsilon_factor(3, 4), Error);
  EXPECT_THROW(epsilon_factor(-1, 4), Error);
}

// ---------------------------------------------------------------------------
// Elliptic model

TEST(KappaElliptic, SummandCancelsPairwiseAtZero) {
  for (std::int64_t n = 1; n <= 50; ++n) {
    const lcplx a = kappa_summand_elliptic(0.0, n, physical);
    const lcplx b = kappa_summand_elliptic(0.0, -n, physical);
    EXPECT_LE(std::abs(a + b), 1e-15L * std::abs(a)) << n;
  }
  EXPECT_LE(std::abs(kappa_elliptic(0.0, physical).value - 1.0), 1e-15);
}

TEST(KappaElliptic, MatchesNaiveSeries) {
  for (std::int64_t r = 1; r <= 3; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (double f : {0.1, 0.3, 0.6, 0.9}) {
      const double alpha = f * np.eta().real();
      EXPECT_LE(rel_err(kappa_elliptic(alpha, np).value, naive_kappa(alpha, np, kappa_summand_elliptic, 120)), 1e-13)
          << "r=" << r << " alpha=" << alpha;
    }
  }
}

TEST(KappaElliptic, FunctionalEquations) {
  const double eta = physical.eta().real();
  const double a = 0.3 * eta;
  EXPECT_LE(std::abs(kappa_elliptic(a, physical).value * kappa_elliptic(-a, physical).value - 1.0), 1e-12);
  const NomeParameters np = physical.with_r(2);
  const double b = 0.25 * eta;
  const cplx ratio = kappa_elliptic(eta - b, np).value / kappa_elliptic(b, np).value;
  EXPECT_LE(rel_err(ratio, lens_elliptic_gamma(I * (eta - 2.0 * b), 0, np).value), 1e-9);
}

TEST(KappaElliptic, OutsideStripDoesNotConverge) {
  try {
    kappa_elliptic(1.5 * physical.eta().real(), physical);
    FAIL() << "expected non-convergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergence);
  }
}

TEST(WeightElliptic, BoundaryConditionAtZero) {
  Draw d(41);
  const NomeParameters np = physical.with_r(3);
  for (int i = 0; i < 10; ++i) {
    EXPECT_LE(std::abs(weight_elliptic(0.0, random_elliptic_spin(d, 3), random_elliptic_spin(d, 3), np).value - 1.0),
              1e-14);
  }
}

TEST(WeightElliptic, SpinReflectionSymmetry) {
  Draw d(42);
  const NomeParameters np = physical.with_r(3);
  for (int i = 0; i < 20; ++i) {
    const Spin a = random_elliptic_spin(d, 3);
    const Spin b = random_elliptic_spin(d, 3);
    const double alpha = d.real(0.05, 0.95) * np.eta().real();
    EXPECT_LE(rel_err(weight_elliptic(alpha, a, b, np).value, weight_elliptic(alpha, b, a, np).value), 1e-12);
  }
}

TEST(WeightElliptic, RealPositiveInPhysicalRegime) {
  Draw d(43);
  for (std::int64_t r = 1; r <= 4; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (int i = 0; i < 10; ++i) {
      const double alpha = d.real(0.01, 0.99) * np.eta().real();
      expect_real_positive(
          weight_elliptic(alpha, random_elliptic_spin(d, r), random_elliptic_spin(d, r), np).value,
          "r=" + std::to_string(r));
    }
  }
}

TEST(WeightElliptic, InvariantUnderSpinTransformation) {
  Draw d(44);
  for (std::int64_t r = 2; r <= 4; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (int i = 0; i < 10; ++i) {
      const Spin a = random_elliptic_spin(d, r);
      const Spin b = random_elliptic_spin(d, r);
      const Spin b_mapped{std::fmod(pi - b.x, pi), mod_bracket(r - b.m, r)};
      const double alpha = d.real(0.05, 0.95) * np.eta().real();
      EXPECT_LE(rel_err(weight_elliptic(alpha, a, b, np).value, weight_elliptic(alpha, a, b_mapped, np).value), 1e-11)
          << "r=" << r;
    }
  }
}

TEST(WeightElliptic, PiPeriodicInEachSpin) {
  Draw d(45);
  const NomeParameters np = physical.with_r(3);
  for (int i = 0; i < 10; ++i) {
    const Spin a = random_elliptic_spin(d, 3);
    const Spin b = random_elliptic_spin(d, 3);
    const double alpha = 0.4 * np.eta().real();
    const cplx base = weight_elliptic(alpha, a, b, np).value;
    EXPECT_LE(rel_err(weight_elliptic(alpha, Spin{a.x + pi, a.m}, b, np).value, base), 1e-12);
    EXPECT_LE(rel_err(weight_elliptic(alpha, a, Spin{b.x + pi, b.m}, np).value, base), 1e-12);
  }
}

TEST(WeightElliptic, FirstInversionRelation) {
  Draw d(46);
  for (std::int64_t r = 1; r <= 3; ++r) {
    const NomeParameters np = physical.with_r(r);
    const Spin a = random_elliptic_spin(d, r);
    const Spin b = random_elliptic_spin(d, r);
    const double alpha = d.real(0.05, 0.95) * np.eta().real();
    EXPECT_LE(std::abs(weight_elliptic(alpha, a, b, np).value * weight_elliptic(-alpha, a, b, np).value - 1.0), 1e-10);
  }
}

TEST(SingleSpinElliptic, TwoFormsAgree) {
  Draw d(47);
  for (std::int64_t r = 1; r <= 3; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (int i = 0; i < 10; ++i) {
      const Spin s = random_elliptic_spin(d, r);
      EXPECT_LE(rel_err(single_spin_elliptic(s, np).value, single_spin_elliptic_theta(s, np).value), 1e-10);
    }
  }
}

TEST(SingleSpinElliptic, NonNegativeOnSpinGrid) {
  for (std::int64_t r = 1; r <= 4; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (std::int64_t m = 0; m <= r / 2; ++m) {
      for (int k = 0; k < 50; ++k) {
        const cplx v = single_spin_elliptic(Spin{pi * k / 50.0, m}, np).value;
        EXPECT_GE(v.real(), -1e-14);
        EXPECT_LE(std::abs(v.imag()), 1e-12 * std::max(1.0, std::abs(v)));
      }
    }
  }
}

TEST(SingleSpinElliptic, OrderOneSpecialization) {
  // r = 1, m = 0: brackets vanish, eps = 1/2, theta shifts are sigma/2, tau/2.
  const double x = 0.7;
  const cplx expected = 0.5 / pi * testing::brute_theta4(2.0 * x + 0.5 * pi * physical.sigma(), physical.p(), 300) *
                        testing::brute_theta4(2.0 * x - 0.5 * pi * physical.tau(), physical.q(), 300);
  EXPECT_LE(rel_err(single_spin_elliptic(Spin{x, 0}, physical).value, expected), 1e-13);
}

TEST(EllipticModel, KappaIsCachedPerAlpha) {
  const EllipticModel model(physical.with_r(2));
  const Evaluation a = model.kappa(0.4);
  const Evaluation b = model.kappa(0.4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_LE(rel_err(a.value, kappa_elliptic(0.4, physical.with_r(2)).value), 0.0);
}

// ---------------------------------------------------------------------------
// r -> infinity model

TEST(QFunction, InversionAndUnitPoint) {
  Draw d(51);
  for (std::int64_t n : {-2, 0, 3}) {
    for (int i = 0; i < 5; ++i) {
      const cplx z = d.complex(-1.5, 1.5, -0.2, 0.2);
      EXPECT_LE(std::abs(q_function(z, n, physical).value * q_function(-z, -n, physical).value - 1.0), 1e-12);
    }
  }
  EXPECT_LE(std::abs(q_function(0.0, 0, physical).value - 1.0), 1e-15);
}

TEST(QFunction, MatchesSingleProduct) {
  const NomeParameters np(cplx(0.1, 0.3), cplx(-0.2, 0.4), 1);
  for (std::int64_t n : {-2, 0, 1, 3}) {
    const cplx z(0.45, 0.05);
    EXPECT_LE(rel_err(q_function(z, n, np).value, brute_q(z, n, np)), 1e-13) << n;
  }
}

TEST(KappaQLimit, FunctionalEquationsAndZero) {
  const double eta = physical.eta().real();
  EXPECT_LE(std::abs(kappa_qlimit(0.4 * eta, physical).value * kappa_qlimit(-0.4 * eta, physical).value - 1.0), 1e-12);
  const double a = 0.3 * eta;
  EXPECT_LE(rel_err(kappa_qlimit(eta - a, physical).value / kappa_qlimit(a, physical).value,
                    q_function(I * (eta - 2.0 * a), 0, physical).value),
            1e-9);
  for (std::int64_t n = 1; n <= 50; ++n) {
    const lcplx a = kappa_summand_qlimit(0.0, n, physical);
    EXPECT_LE(std::abs(a + kappa_summand_qlimit(0.0, -n, physical)), 1e-15L * std::abs(a)) << n;
  }
  EXPECT_LE(std::abs(kappa_qlimit(0.0, physical).value - 1.0), 1e-15);
}

TEST(KappaQLimit, MatchesNaiveSeries) {
  for (double f : {0.2, 0.5, 0.8}) {
    const double alpha = f * physical.eta().real();
    EXPECT_LE(rel_err(kappa_qlimit(alpha, physical).value, naive_kappa(alpha, physical, kappa_summand_qlimit, 120)),
              1e-13);
  }
}

TEST(KappaQLimit, IsLargeOrderLimitOfEllipticKappa) {
  const double alpha = 0.35 * physical.eta().real();
  const cplx limit = kappa_qlimit(alpha, physical).value;
  double previous = std::numeric_limits<double>::infinity();
  for (std::int64_t r : {2, 4, 8, 16}) {
    const double dev = rel_err(kappa_elliptic(alpha, physical.with_r(r)).value, limit);
    EXPECT_LT(dev, previous) << r;
    previous = dev;
  }
  EXPECT_LT(previous, 1e-10);
}

TEST(WeightQLimit, BoundarySymmetryPositivityInversion) {
  Draw d(52);
  for (int i = 0; i < 10; ++i) {
    const Spin a{d.real(0.0, pi), d.integer(-3, 3)};
    const Spin b{d.real(0.0, pi), d.integer(-3, 3)};
    const double alpha = d.real(0.05, 0.95) * physical.eta().real();
    EXPECT_LE(std::abs(weight_qlimit(0.0, a, b, physical).value - 1.0), 1e-14);
    const cplx w = weight_qlimit(alpha, a, b, physical).value;
    EXPECT_LE(rel_err(w, weight_qlimit(alpha, b, a, physical).value), 1e-12);
    expect_real_positive(w, "qlimit weight");
    EXPECT_LE(std::abs(w * weight_qlimit(-alpha, a, b, physical).value - 1.0), 1e-10);
    EXPECT_LE(rel_err(weight_qlimit(alpha, Spin{a.x + pi, a.m}, b, physical).value, w), 1e-12);
  }
}

TEST(SingleSpinQLimit, PeriodicPositiveAndMatchesProduct) {
  Draw d(53);
  for (int i = 0; i < 10; ++i) {
    const Spin s{d.real(0.0, pi), d.integer(-3, 3)};
    const cplx v = single_spin_qlimit(s, physical).value;
    EXPECT_LE(rel_err(single_spin_qlimit(Spin{s.x + pi, s.m}, physical).value, v), 1e-12);
    expect_real_positive(v, "qlimit single spin");
  }
  // p = q = 0.3, m = 0, x = pi/4.
  const cplx sigma = -I * std::log(0.3) / pi;
  const NomeParameters np(sigma, sigma, 1);
  const double x = pi / 4.0;
  const cplx eta = np.eta();
  const cplx expected = brute_q(2.0 * x - I * eta, 0, np) * brute_q(-2.0 * x - I * eta, 0, np) / (2.0 * pi);
  EXPECT_LE(rel_err(single_spin_qlimit(Spin{x, 0}, np).value, expected), 1e-13);
}

// ---------------------------------------------------------------------------
// Gamma-limit model

TEST(WeightGamma, BoundaryInversionSymmetry) {
  Draw d(61);
  for (int i = 0; i < 20; ++i) {
    const Spin a{d.real(-2.0, 2.0), d.integer(-3, 3)};
    const Spin b{d.real(-2.0, 2.0), d.integer(-3, 3)};
    const double alpha = d.real(0.05, 0.95);
    EXPECT_LE(std::abs(weight_gamma(0.0, a, b) - 1.0), 1e-14);
    const double w = weight_gamma(alpha, a, b);
    EXPECT_GT(w, 0.0);
    EXPECT_LE(std::abs(w * weight_gamma(-alpha, a, b) - 1.0), 1e-12);
    EXPECT_LE(std::abs(w - weight_gamma(alpha, b, a)), 1e-14 * w);
  }
}

TEST(WeightGamma, MatchesDirectGammaRatio) {
  // Small arguments where tgamma of complex values is not needed: x = 0.
  const Spin a{0.0, 1};
  const Spin b{0.0, 0};
  const double al = 0.4;
  const auto g = [](double v) { return std::tgamma(v); };
  // M = 1 for both pairs, X = 0: prefactor times [Gamma((2-a)/2)/Gamma((2+a)/2)]^4.
  const double expected = g((1 + al) / 2) / g((1 - al) / 2) * std::pow(g((2 - al) / 2) / g((2 + al) / 2), 4);
  EXPECT_LE(std::abs(weight_gamma(al, a, b) - expected), 1e-13 * expected);
}

TEST(SingleSpinGamma, Examples) {
  EXPECT_EQ(single_spin_gamma(Spin{0.0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(single_spin_gamma(Spin{1.0, 0}), 1.0 / (4.0 * pi));
  EXPECT_DOUBLE_EQ(single_spin_gamma(Spin{2.0, 3}), 13.0 / (4.0 * pi));
}

// ---------------------------------------------------------------------------
// Crossing

TEST(CrossingWeight, AtEtaGivesOne) {
  const Spin a{0.4, 1};
  const Spin b{1.1, 0};
  const NomeParameters np = physical.with_r(2);
  EXPECT_LE(std::abs(crossing_weight(ModelFamily::elliptic, np.eta(), a, b, np) - 1.0), 1e-14);
  EXPECT_LE(std::abs(crossing_weight(ModelFamily::qlimit, np.eta(), a, b, np) - 1.0), 1e-14);
  EXPECT_LE(std::abs(crossing_weight(ModelFamily::gamma_limit, 1.0, a, b, np) - 1.0), 1e-14);
}

TEST(CrossingWeight, TwiceReturnsOriginalAndMatchesDirect) {
  const Spin a{0.4, 1};
  const Spin b{1.1, 0};
  const NomeParameters np = physical.with_r(2);
  const double eta = np.eta().real();
  const double alpha = 0.3 * eta;
  EXPECT_LE(rel_err(crossing_weight(ModelFamily::elliptic, eta - alpha, a, b, np),
                    weight_elliptic(alpha, a, b, np).value),
            1e-14);
  EXPECT_LE(rel_err(crossing_weight(ModelFamily::elliptic, alpha, a, b, np),
                    weight_elliptic(eta - alpha, a, b, np).value),
            0.0);
  EXPECT_LE(std::abs(crossing_weight(ModelFamily::gamma_limit, 1.0 - 0.3, a, b, np) - weight_gamma(0.3, a, b)),
            1e-14 * weight_gamma(0.3, a, b));
}

}  // namespace
}  // namespace lensgamma
