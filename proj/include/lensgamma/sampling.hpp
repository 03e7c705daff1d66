#pragma once

// Seeded samplers for randomized sweeps.
//
// Generator: std::mt19937_64 seeded with the sweep seed. Derived draws:
//   uniform()        (x >> 11) * 2^-53 in [0, 1), x the next 64-bit output
//   uniform(a, b)    a + (b - a) * uniform()
//   integer(lo, hi)  lo + floor(uniform() * (hi - lo + 1)), clamped to hi
//   dirichlet(n)     e_i = -log(1 - uniform()), normalised by their sum
// Every sample is drawn in a fixed order, so another implementation of the
// same generator reproduces a sweep exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lensgamma/models.hpp"
#include "lensgamma/params.hpp"
#include "lensgamma/verify.hpp"

namespace lensgamma {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const double span = static_cast<double>(hi - lo + 1);
    const auto k = static_cast<std::int64_t>(std::floor(uniform() * span));
    return std::min(lo + k, hi);
  }

  std::vector<double> dirichlet(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - uniform());
      total += x;
    }
    for (double& x : w) x /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

/// alpha_i = eta (0.1 + 0.7 w_i), w ~ Dirichlet(1,1,1); the last one is
/// eta - alpha_1 - alpha_2 so the constraint holds to rounding.
inline Alphas sample_alphas(Rng& rng, double eta) {
  const std::vector<double> w = rng.dirichlet(3);
  Alphas a{};
  a[0] = eta * (0.1 + 0.7 * w[0]);
  a[1] = eta * (0.1 + 0.7 * w[1]);
  a[2] = eta - a[0] - a[1];
  return a;
}

/// Elliptic domain: x uniform in [0, pi), m uniform in [0, floor(r/2)].
inline Spin sample_spin_elliptic(Rng& rng, std::int64_t r) {
  const double x = rng.uniform(0.0, pi);
  return Spin{x, rng.integer(0, r / 2)};
}

/// q-limit domain: x uniform in [0, pi), m uniform in [-m_max, m_max].
inline Spin sample_spin_qlimit(Rng& rng, std::int64_t m_max = 3) {
  const double x = rng.uniform(0.0, pi);
  return Spin{x, rng.integer(-m_max, m_max)};
}

/// Gamma-limit domain: x uniform in [-x_max, x_max], m uniform in [-m_max, m_max].
inline Spin sample_spin_gamma(Rng& rng, double x_max = 2.0, std::int64_t m_max = 3) {
  const double x = rng.uniform(-x_max, x_max);
  return Spin{x, rng.integer(-m_max, m_max)};
}

/// Summation/integration identity parameters:
/// Im t_i = 2 Re(eta) (floor + (1 - 6 floor) w_i), w ~ Dirichlet(1^6), so the
/// imaginary parts sum to 2 Re(eta) and none is below 2 Re(eta) floor; Re t_i uniform in
/// [-1, 1] for i < 6; u_i uniform in [-r, r] for i < 6; t_6, u_6 fix the sums.
/// The default floor 1/12 keeps the pole margin well above the rejection threshold.
inline MasterParameters sample_master(Rng& rng, const NomeParameters& np, double im_floor = 1.0 / 12.0) {
  const double two_eta = 2.0 * np.eta().real();
  const std::vector<double> w = rng.dirichlet(6);
  std::array<cplx, 5> t{};
  std::array<std::int64_t, 5> u{};
  for (std::size_t i = 0; i < 5; ++i) {
    const double re = rng.uniform(-1.0, 1.0);
    t[i] = cplx(re, two_eta * (im_floor + (1.0 - 6.0 * im_floor) * w[i]));
  }
  for (std::size_t i = 0; i < 5; ++i) u[i] = rng.integer(-np.r(), np.r());
  return MasterParameters::from_five(t, u, np);
}

/// Five-tuple for the constant form: Im A = 0.6 Re(eta), split as
/// Im t_i = 0.6 Re(eta) (0.1 + 0.5 w_i), w ~ Dirichlet(1^5); Re t_i uniform in
/// [-1, 1]; u_i uniform in [-r, r]. The floor 0.06 Re(eta) keeps every pole
/// clear of the 0.05 eta contour margin. After t_1 -> t_1 + pi sigma in the physical
/// regime Im A stays below 2 eta.
struct FiveTuple {
  FiveT t{};
  FiveU u{};
};

inline FiveTuple sample_five(Rng& rng, const NomeParameters& np) {
  const double total = 0.6 * np.eta().real();
  const std::vector<double> w = rng.dirichlet(5);
  FiveTuple f;
  for (std::size_t i = 0; i < 5; ++i) {
    const double re = rng.uniform(-1.0, 1.0);
    f.t[i] = cplx(re, total * (0.1 + 0.5 * w[i]));
  }
  for (std::size_t i = 0; i < 5; ++i) f.u[i] = rng.integer(-np.r(), np.r());
  return f;
}

}  // namespace lensgamma
