// Acceptance run: one PASS/FAIL line per criterion with the measured figure of
// merit and runtime. Exit status is 0 only when every criterion passes.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lensgamma/lensgamma.hpp"
#include "test_support.hpp"

using namespace lensgamma;
using testing::Draw;
using testing::rel_err;

namespace {

const NomeParameters physical = NomeParameters::physical(0.05, 0.5, 1);

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects the worst deviation seen and whether every check held.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && pass_) first_failure_ = what;
    pass_ = pass_ && ok;
  }
  void deviation(double value, double limit, const std::string& what) {
    worst_ = std::max(worst_, std::isnan(value) ? INFINITY : value);
    check(value <= limit, what);
  }
  void report(const VerificationReport& rep, const std::string& what) {
    if (std::isfinite(rep.rel_residual)) worst_ = std::max(worst_, rep.rel_residual);
    check(rep.pass, what + " (" + rep.identity_name + ": " + std::string(to_string(rep.status)) + ")");
  }
  void runtime(double seconds, double limit, const std::string& what) {
    slowest_ = std::max(slowest_, seconds);
    check(seconds < limit, what + " exceeded " + format_number(limit) + " s");
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream s;
    s << summary << "; worst deviation " << format_number(worst_);
    if (slowest_ > 0.0) s << "; slowest case " << format_number(slowest_) << " s";
    if (!pass_) s << "; first failure: " << first_failure_;
    return {pass_, s.str()};
  }

 private:
  bool pass_ = true;
  double worst_ = 0.0;
  double slowest_ = 0.0;
  std::string first_failure_;
};

template <class F>
double timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Random nomes p = e^{i pi sigma}, q = e^{i pi tau} with |p|, |q| <= 0.7.
NomeParameters random_nomes(Draw& d, std::int64_t r) {
  const double im_min = -std::log(0.7) / pi;
  return NomeParameters(d.complex(-1.0, 1.0, im_min, 1.0), d.complex(-1.0, 1.0, im_min, 1.0), r);
}

std::string spins_text(const Spins& s) {
  std::ostringstream o;
  for (const Spin& x : s) o << "(" << x.x << "," << x.m << ")";
  return o.str();
}

// ---------------------------------------------------------------------------

Outcome ac1_reduction() {
  Tally t;
  Draw d(101);
  for (int i = 0; i < 100; ++i) {
    const NomeParameters np = random_nomes(d, 1);
    const cplx z = d.complex(-pi, pi, -0.1, 0.1);
    t.deviation(rel_err(lens_elliptic_gamma(z, 0, np).value, elliptic_gamma(z, np.p(), np.q()).value), 1e-12,
                "z=" + format_number(z.real()));
  }
  return t.outcome("100 random z, |p|,|q| <= 0.7, r = 1");
}

Outcome ac2_inversion_periodicity() {
  Tally t;
  Draw d(102);
  const double tol = 1e-10;
  for (int i = 0; i < 100; ++i) {
    // elliptic gamma: inversion and pi-periodicity
    const NomeParameters np1 = random_nomes(d, 1);
    const cplx z = d.complex(-pi, pi, -0.1, 0.1);
    const cplx g = elliptic_gamma(z, np1.p(), np1.q()).value;
    t.deviation(std::abs(g * elliptic_gamma(-z, np1.p(), np1.q()).value - 1.0), tol, "Phi inversion");
    t.deviation(rel_err(elliptic_gamma(z + pi, np1.p(), np1.q()).value, g), tol, "Phi periodicity");

    // lens elliptic gamma: inversion in (z, m) and pi-periodicity
    const std::int64_t r = d.integer(1, 5);
    const std::int64_t m = d.integer(-2 * r, 2 * r);
    const NomeParameters np = random_nomes(d, r);
    const cplx w = d.complex(-pi, pi, -0.1, 0.1);
    const cplx phi = lens_elliptic_gamma(w, m, np).value;
    t.deviation(std::abs(phi * lens_elliptic_gamma(-w, -m, np).value - 1.0), tol, "Phi_{r,m} inversion");
    t.deviation(rel_err(lens_elliptic_gamma(w + pi, m, np).value, phi), tol, "Phi_{r,m} periodicity");

    // lens gamma: reflection z -> 2 i eta - z with m -> -m
    const NomeParameters npp = physical.with_r(r);
    const cplx y = d.complex(-pi, pi, 0.3, 1.2);
    const cplx gam = lens_gamma_appendix(y, m, npp).value *
                     lens_gamma_appendix(2.0 * I * npp.eta() - y, -m, npp).value;
    t.deviation(std::abs(gam - 1.0), tol, "Gamma reflection");

    // lens theta: quasi-periodicity under z -> z + pi tau r and z -> z + 2 pi r
    const cplx x = d.complex(-pi, pi, -0.2, 0.2);
    const double rr = static_cast<double>(r);
    const cplx th = lens_theta(x, m, np).value;
    const cplx shifted = lens_theta(x + rr * pi * np.tau(), m, np).value;
    t.deviation(rel_err(shifted, -std::exp(-I * x - I * pi * np.tau() * (rr - 1.0) / 2.0) * th), tol,
                "theta quasi-periodicity");
    t.deviation(rel_err(lens_theta(x + 2.0 * pi * rr, m, np).value, (r % 2 == 1 ? 1.0 : -1.0) * th), tol,
                "theta periodicity");

    // Q: inversion in (z, n) and pi-periodicity
    const std::int64_t n = d.integer(-5, 5);
    const cplx v = d.complex(-pi, pi, -0.1, 0.1);
    const cplx qv = q_function(v, n, np).value;
    t.deviation(std::abs(qv * q_function(-v, -n, np).value - 1.0), tol, "Q inversion");
    t.deviation(rel_err(q_function(v + pi, n, np).value, qv), tol, "Q periodicity");
  }
  return t.outcome("100 cases each for Phi, Phi_{r,m}, Gamma, theta, Q; r in 1..5");
}

Outcome ac3_brackets() {
  Tally t;
  const VerificationReport rep = verify_bracket_identities(64);
  t.report(rep, "brackets");
  std::ostringstream s;
  s << rep.details["checked"].get<std::int64_t>() << " checks, "
    << rep.details["counterexamples"].size() << " counterexamples, r in 1..64";
  return t.outcome(s.str());
}

Outcome ac4_kappa() {
  Tally t;
  Draw d(104);
  for (int i = 0; i < 20; ++i) {
    const NomeParameters np = physical.with_r(1 + i % 4);
    const double alpha = d.real(0.0, 1.0) * np.eta().real();
    for (ModelFamily f : {ModelFamily::elliptic, ModelFamily::qlimit}) {
      for (const VerificationReport& rep : verify_kappa(f, alpha, np, 1e-8)) {
        t.report(rep, "alpha=" + format_number(alpha));
      }
    }
  }
  return t.outcome("20 random alpha in (0, eta), elliptic and r -> infinity kappa");
}

Outcome ac5_str() {
  Tally t;
  Rng rng(105);
  for (std::int64_t r = 1; r <= 4; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (int i = 0; i < 10; ++i) {
      const Alphas a = sample_alphas(rng, np.eta().real());
      Spins s{};
      for (Spin& x : s) x = sample_spin_elliptic(rng, r);
      VerificationReport rep;
      const double sec = timed([&] { rep = verify_str(s, a, np, 1e-6); });
      t.report(rep, "r=" + std::to_string(r) + " spins " + spins_text(s));
      t.runtime(sec, 10.0, "str case");
    }
  }
  return t.outcome("r in 1..4, 10 random configurations each, tol 1e-6");
}

Outcome ac6_master() {
  Tally t;
  Rng rng(106);
  for (std::int64_t r = 1; r <= 3; ++r) {
    const NomeParameters np = physical.with_r(r);
    for (int i = 0; i < 10; ++i) {
      const MasterParameters mp = sample_master(rng, np);
      VerificationReport rep;
      double sec = timed([&] { rep = verify_master(mp, 1e-6); });
      t.report(rep, "master r=" + std::to_string(r));
      t.runtime(sec, 20.0, "master case");

      const FiveTuple f = sample_five(rng, np);
      std::vector<VerificationReport> reps;
      sec = timed([&] { reps = verify_I_constant(f.t, f.u, np, 1e-6, 1e-7); });
      for (const VerificationReport& x : reps) t.report(x, "constant form r=" + std::to_string(r));
      t.runtime(sec, 20.0, "constant-form case");
    }
  }
  // Elliptic beta integral: r = 1 with every discrete charge zero.
  Rng beta_rng(1060);
  for (int i = 0; i < 10; ++i) {
    MasterParameters mp = sample_master(beta_rng, physical);
    std::array<cplx, 5> t5{};
    for (std::size_t k = 0; k < 5; ++k) t5[k] = mp.t[k];
    mp = MasterParameters::from_five(t5, {0, 0, 0, 0, 0}, physical);
    t.report(verify_master(mp, 1e-6), "elliptic beta integral");
  }
  return t.outcome("r in 1..3, 10 random (t,u) each for both forms; shift tol 1e-7; 10 beta-integral cases");
}

Outcome ac7_change_of_variables() {
  Tally t;
  Rng rng(107);
  for (int i = 0; i < 5; ++i) {
    const std::int64_t r = 1 + i % 3;
    const NomeParameters np = physical.with_r(r);
    const Alphas a = sample_alphas(rng, np.eta().real());
    Spins s{};
    for (Spin& x : s) x = sample_spin_elliptic(rng, r);
    const VerificationReport direct = verify_str(s, a, np, 1e-6);
    const VerificationReport via = verify_str_via_master(s, a, np, 1e-6);
    t.report(via, "via master r=" + std::to_string(r));
    t.deviation(rel_err(via.lhs, direct.lhs), 1e-8, "lhs r=" + std::to_string(r));
    t.deviation(rel_err(via.rhs, direct.rhs), 1e-8, "rhs r=" + std::to_string(r));
  }
  return t.outcome("5 cases, left and right sides compared separately");
}

Outcome ac8_theta_difference() {
  Tally t;
  Rng rng(108);
  Draw d(1080);
  for (std::int64_t r = 1; r <= 3; ++r) {
    const NomeParameters np = physical.with_r(r);
    const FiveTuple f = sample_five(rng, np);
    for (int i = 0; i < 50; ++i) {
      const cplx z = d.complex(0.0, 2.0 * pi, -0.2, 0.2);
      const std::int64_t y = d.integer(0, r - 1);
      for (const VerificationReport& rep : verify_theta_difference(z, y, f.t, f.u, np, 1e-8)) {
        t.report(rep, "r=" + std::to_string(r));
      }
    }
    for (std::int64_t y = 0; y < r; ++y) {
      const cplx z0 = -f.t[0] - pi * np.tau() * static_cast<double>(mod_bracket(-f.u[0] - y, r));
      // The approach is linear in the offset: check it shrinks, then the bound at the closer point.
      const ThetaSides far = theta_difference_sides(z0 + cplx(1e-5, 1e-5), y, f.t, f.u, np);
      const ThetaSides s = theta_difference_sides(z0 + cplx(1e-6, 1e-6), y, f.t, f.u, np);
      const std::string where = " r=" + std::to_string(r) + " y=" + std::to_string(y);
      t.check(std::abs(s.lhs + 1.0) < std::abs(far.lhs + 1.0), "near-point lhs not approaching" + where);
      t.check(std::abs(s.rhs + 1.0) < std::abs(far.rhs + 1.0), "near-point rhs not approaching" + where);
      t.deviation(std::abs(s.lhs + 1.0), 1e-4, "near-point lhs" + where);
      t.deviation(std::abs(s.rhs + 1.0), 1e-4, "near-point rhs" + where);
    }
  }
  return t.outcome("50 random z per r in 1..3 with shift invariance; near-point limit -1");
}

Outcome ac9_rinfstr() {
  Tally t;
  Rng rng(109);
  const double tol = 1e-6;
  for (int i = 0; i < 10; ++i) {
    const Alphas a = sample_alphas(rng, physical.eta().real());
    Spins s{};
    for (Spin& x : s) x = sample_spin_qlimit(rng, 3);
    const VerificationReport rep = verify_rinfstr(s, a, physical, tol);
    t.report(rep, "spins " + spins_text(s));
    t.check(rep.meta.tail_bound < 0.1 * tol, "tail bound " + format_number(rep.meta.tail_bound));
  }
  return t.outcome("10 random configurations, |m| <= 3, tail bound < 0.1 tol");
}

Outcome ac10_strmsg() {
  Tally t;
  Rng rng(110);
  Spins last{};
  Alphas last_a{};
  for (int i = 0; i < 10; ++i) {
    const Alphas a = sample_alphas(rng, 1.0);
    Spins s{};
    for (Spin& x : s) x = sample_spin_gamma(rng, 2.0, 3);
    t.report(verify_strmsg(s, a, 1e-4), "spins " + spins_text(s));
    last = s;
    last_a = a;
  }
  double previous = INFINITY;
  for (int k = 0; k < 3; ++k) {
    QuadratureSettings qs;
    qs.line.fixed_cutoff = 8.0 * static_cast<double>(1 << k);
    qs.sum.fixed_terms = 4 << k;
    const double res = verify_strmsg(last, last_a, 1e-4, qs).rel_residual;
    t.check(res < previous, "residual did not shrink at cutoff doubling " + std::to_string(k));
    previous = res;
  }
  return t.outcome("10 random configurations, |m| <= 3, |x| <= 2; residual shrinks over 3 cutoff doublings");
}

Outcome ac11_limits() {
  Tally t;
  const NomeParameters np = NomeParameters::physical(0.05, 0.25, 1);
  for (std::int64_t n : {1, -2, 3}) {
    const VerificationReport rep = verify_limit_r_to_inf(0.3, n, np, {4, 8, 16, 32});
    const std::vector<double> e = rep.details["errors"].get<std::vector<double>>();
    for (std::size_t i = 1; i < e.size(); ++i) t.check(e[i] < e[i - 1], "r-limit n=" + std::to_string(n));
  }
  for (auto [x, m] : std::vector<std::pair<double, std::int64_t>>{{1.0, 0}, {1.0, 2}, {0.5, -1}}) {
    const VerificationReport rep = verify_limit_hbar(0.3, x, m, {0.2, 0.1, 0.05});
    for (const char* key : {"q_deviation", "kappa_deviation", "single_spin_deviation"}) {
      const std::vector<double> e = rep.details[key].get<std::vector<double>>();
      t.check(e.size() == 3, std::string(key) + " missing");
      for (std::size_t i = 1; i < e.size(); ++i) {
        t.check(e[i] < e[i - 1], std::string(key) + " m=" + std::to_string(m));
      }
    }
  }
  return t.outcome("r in {4,8,16,32} for n in {1,-2,3}; hbar in {0.2,0.1,0.05} for Q, kappa, single spin");
}

Outcome ac12_single_spin_forms() {
  Tally t;
  Draw d(112);
  for (int i = 0; i < 50; ++i) {
    const std::int64_t r = 1 + i % 4;
    const Spin s{d.real(0.0, pi), d.integer(0, r / 2)};
    t.report(verify_single_spin_forms(s, physical.with_r(r), 1e-10), "r=" + std::to_string(r));
  }
  return t.outcome("50 random spins, r in 1..4");
}

std::string run_cli_env(const std::string& env, const std::string& args) {
  const std::string cmd = env + " \"" LENSGAMMA_CLI_PATH "\" " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "exit " + std::to_string(status);
  return out;
}

Outcome ac13_determinism() {
  Tally t;
  for (const std::string identity : {"str", "master", "theta_difference", "I_constant"}) {
    const std::string args = "sweep --identity " + identity + " --r 2 --samples 8 --seed 13";
    const std::string a = run_cli_env("LENSGAMMA_WORKERS=1", args);
    const std::string b = run_cli_env("LENSGAMMA_WORKERS=1", args);
    const std::string c = run_cli_env("LENSGAMMA_WORKERS=4", args);
    t.check(!a.empty() && a.rfind("exit ", 0) != 0, identity + " sweep did not run");
    t.check(a == b, identity + " differs between runs");
    t.check(a == c, identity + " differs between worker counts");
  }
  return t.outcome("CLI sweeps of str, master, theta_difference, I_constant: two runs and 1 vs 4 workers byte-identical");
}

}  // namespace

int main() {
  struct Criterion {
    std::string id;
    std::function<Outcome()> run;
    double time_limit;  // seconds for the whole criterion; per-case limits are checked inside
  };
  const std::vector<Criterion> criteria = {
      {"AC1", ac1_reduction, 5.0},          {"AC2", ac2_inversion_periodicity, 30.0},
      {"AC3", ac3_brackets, 5.0},           {"AC4", ac4_kappa, 30.0},
      {"AC5", ac5_str, INFINITY},           {"AC6", ac6_master, INFINITY},
      {"AC7", ac7_change_of_variables, INFINITY}, {"AC8", ac8_theta_difference, INFINITY},
      {"AC9", ac9_rinfstr, INFINITY},       {"AC10", ac10_strmsg, INFINITY},
      {"AC11", ac11_limits, INFINITY},      {"AC12", ac12_single_spin_forms, INFINITY},
      {"AC13", ac13_determinism, INFINITY},
  };
  int failures = 0;
  for (const auto& [id, run, time_limit] : criteria) {
    Outcome o;
    const double sec = timed([&] {
      try {
        o = run();
      } catch (const Error& e) {
        o = {false, std::string("error: ") + e.what()};
      }
    });
    if (sec >= time_limit) {
      o.pass = false;
      o.detail += "; runtime limit " + format_number(time_limit) + " s exceeded";
    }
    if (!o.pass) ++failures;
    std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << " [" << format_number(std::round(sec * 1000) / 1000)
              << " s] " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
