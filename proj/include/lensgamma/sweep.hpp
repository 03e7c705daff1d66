#pragma once

// Seeded randomized sweeps. All samples are drawn sequentially from one
// generator before any evaluation starts; cases then run on a worker pool and
// rows are stored by sample index, so the output does not depend on the
// number of workers.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "lensgamma/errors.hpp"
#include "lensgamma/models.hpp"
#include "lensgamma/report.hpp"
#include "lensgamma/sampling.hpp"
#include "lensgamma/verify.hpp"

namespace lensgamma {

struct IdentityInfo {
  std::string_view name;
  double default_tolerance;
  bool sweepable;
};

/// Every identity the verify and sweep commands know about.
inline constexpr std::array<IdentityInfo, 14> identity_table = {{
    {"str", 1e-6, true},
    {"rinfstr", 1e-6, true},
    {"strmsg", 1e-4, true},
    {"master", 1e-6, true},
    {"str_via_master", 1e-6, true},
    {"I_constant", 1e-6, true},
    {"theta_difference", 1e-8, true},
    {"gamma_phi_bridge", 1e-10, true},
    {"brackets", 0.0, false},
    {"limit_r", monotone_slack, false},
    {"limit_hbar", monotone_slack, false},
    {"inversion", 1e-10, true},
    {"kappa", 1e-8, true},
    {"single_spin_forms", 1e-10, true},
}};

inline const IdentityInfo* find_identity(std::string_view name) {
  for (const IdentityInfo& info : identity_table) {
    if (info.name == name) return &info;
  }
  return nullptr;
}

/// Maps a library error to a report row so one bad sample never aborts a sweep.
inline VerificationReport error_report(std::string_view identity, const Error& e) {
  VerificationReport rep;
  rep.identity_name = std::string(identity);
  rep.meta.converged = e.kind() != ErrorKind::non_convergence;
  switch (e.kind()) {
    case ErrorKind::contour_violation:
      rep.status = ReportStatus::contour_violation;
      break;
    case ErrorKind::non_convergence:
      rep.status = ReportStatus::non_convergence;
      break;
    default:
      rep.status = ReportStatus::invalid_parameter;
      break;
  }
  rep.pass = false;
  rep.abs_residual = std::numeric_limits<double>::quiet_NaN();
  rep.rel_residual = std::numeric_limits<double>::quiet_NaN();
  rep.details["error"] = std::string(to_string(e.kind()));
  rep.details["message"] = e.what();
  return rep;
}

struct SweepConfig {
  std::string identity = "str";
  NomeParameters params = NomeParameters::physical(0.05, 0.5, 1);
  double tol = 1e-6;
  double shift_tol = 1e-7;
  std::uint64_t seed = 0;
  std::int64_t samples = 1;
  unsigned workers = 1;
  /// Lower bound of Im t_i as a fraction of 2 eta for the master sampler.
  double im_floor = 1.0 / 12.0;
  ModelFamily family = ModelFamily::elliptic;
};

struct SweepSummary {
  std::string identity;
  std::int64_t samples = 0;
  std::int64_t rows = 0;
  std::int64_t pass_count = 0;
  std::int64_t fail_count = 0;
  std::int64_t non_convergence_count = 0;
  std::int64_t contour_violation_count = 0;
  std::int64_t invalid_count = 0;
  double max_rel_residual = 0.0;
  double runtime_seconds = 0.0;
};

struct SweepResult {
  std::vector<VerificationReport> rows;
  SweepSummary summary;
};

using SweepCase = std::function<std::vector<VerificationReport>()>;

/// Draws all cases for the configured identity.
inline std::vector<SweepCase> draw_sweep_cases(const SweepConfig& cfg) {
  const IdentityInfo* info = find_identity(cfg.identity);
  if (info == nullptr || !info->sweepable) {
    raise(ErrorKind::invalid_parameter, "sweep: identity '" + cfg.identity + "' cannot be swept");
  }
  require(cfg.samples >= 1, ErrorKind::invalid_parameter, "sweep: samples must be >= 1");
  Rng rng(cfg.seed);
  const NomeParameters np = cfg.params;
  const double tol = cfg.tol;
  const double eta = np.eta().real();
  const std::int64_t r = np.r();
  std::vector<SweepCase> cases;
  for (std::int64_t n = 0; n < cfg.samples; ++n) {
    const std::string& id = cfg.identity;
    if (id == "str" || id == "str_via_master") {
      const Alphas a = sample_alphas(rng, eta);
      Spins s{};
      for (Spin& x : s) x = sample_spin_elliptic(rng, r);
      const bool via_master = id == "str_via_master";
      cases.push_back([=] {
        return std::vector{via_master ? verify_str_via_master(s, a, np, tol) : verify_str(s, a, np, tol)};
      });
    } else if (id == "rinfstr") {
      const Alphas a = sample_alphas(rng, eta);
      Spins s{};
      for (Spin& x : s) x = sample_spin_qlimit(rng);
      cases.push_back([=] { return std::vector{verify_rinfstr(s, a, np, tol)}; });
    } else if (id == "strmsg") {
      const Alphas a = sample_alphas(rng, 1.0);
      Spins s{};
      for (Spin& x : s) x = sample_spin_gamma(rng);
      cases.push_back([=] { return std::vector{verify_strmsg(s, a, tol)}; });
    } else if (id == "master") {
      const MasterParameters mp = sample_master(rng, np, cfg.im_floor);
      cases.push_back([=] { return std::vector{verify_master(mp, tol)}; });
    } else if (id == "I_constant") {
      const FiveTuple f = sample_five(rng, np);
      const double shift_tol = cfg.shift_tol;
      cases.push_back([=] { return verify_I_constant(f.t, f.u, np, tol, shift_tol); });
    } else if (id == "theta_difference") {
      const FiveTuple f = sample_five(rng, np);
      const cplx z(rng.uniform(0.0, 2.0 * pi), rng.uniform(-0.1, 0.1));
      const std::int64_t y = rng.integer(0, r - 1);
      cases.push_back([=] { return verify_theta_difference(z, y, f.t, f.u, np, tol); });
    } else if (id == "gamma_phi_bridge") {
      const cplx z(rng.uniform(0.0, pi), rng.uniform(-0.2, 0.2));
      const std::int64_t m = rng.integer(0, r - 1);
      cases.push_back([=] { return std::vector{verify_gamma_phi_bridge(z, m, np, tol)}; });
    } else if (id == "inversion") {
      const double alpha = rng.uniform(0.0, eta);
      Spin si{};
      Spin sj{};
      if (cfg.family == ModelFamily::elliptic) {
        si = sample_spin_elliptic(rng, r);
        sj = sample_spin_elliptic(rng, r);
      } else if (cfg.family == ModelFamily::qlimit) {
        si = sample_spin_qlimit(rng);
        sj = sample_spin_qlimit(rng);
      } else {
        si = sample_spin_gamma(rng);
        sj = sample_spin_gamma(rng);
      }
      const ModelFamily fam = cfg.family;
      const double a = fam == ModelFamily::gamma_limit ? alpha / eta : alpha;
      cases.push_back([=] { return std::vector{verify_inversion_first(fam, a, si, sj, np, tol)}; });
    } else if (id == "kappa") {
      const double alpha = eta * rng.uniform(0.0, 1.0);
      const ModelFamily fam = cfg.family;
      cases.push_back([=] { return verify_kappa(fam, alpha, np, tol); });
    } else if (id == "single_spin_forms") {
      const Spin s = sample_spin_elliptic(rng, r);
      cases.push_back([=] { return std::vector{verify_single_spin_forms(s, np, tol)}; });
    }
  }
  return cases;
}

/// Runs a sweep on `cfg.workers` threads (at least one).
inline SweepResult run_sweep(const SweepConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SweepCase> cases = draw_sweep_cases(cfg);
  std::vector<std::vector<VerificationReport>> results(cases.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      try {
        results[i] = cases[i]();
      } catch (const Error& e) {
        results[i] = {error_report(cfg.identity, e)};
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cases.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepResult out;
  out.summary.identity = cfg.identity;
  out.summary.samples = cfg.samples;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (VerificationReport& rep : results[i]) {
      rep.seed = cfg.seed;
      rep.details["sample"] = i;
      switch (rep.status) {
        case ReportStatus::pass:
          ++out.summary.pass_count;
          break;
        case ReportStatus::fail:
          if (rep.gate) {
            ++out.summary.fail_count;
          } else {
            ++out.summary.pass_count;
          }
          break;
        case ReportStatus::non_convergence:
          ++out.summary.non_convergence_count;
          break;
        case ReportStatus::contour_violation:
          ++out.summary.contour_violation_count;
          break;
        case ReportStatus::invalid_parameter:
          ++out.summary.invalid_count;
          break;
      }
      if (rep.gate && std::isfinite(rep.rel_residual)) {
        out.summary.max_rel_residual = std::max(out.summary.max_rel_residual, rep.rel_residual);
      }
      out.rows.push_back(std::move(rep));
    }
  }
  out.summary.rows = static_cast<std::int64_t>(out.rows.size());
  out.summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lensgamma
