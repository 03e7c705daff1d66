// lensgamma: evaluate lens elliptic gamma functions and Boltzmann weights,
// verify identities, run seeded sweeps and inspect contour pole margins.
//
//   lensgamma eval lens_elliptic_gamma r=3 m=1 z=0.3+0.1i
//   lensgamma verify str --r 2 x1=0.3 m1=1 alpha1=0.4
//   lensgamma sweep --identity master --samples 10 --seed 1 --r 2
//   lensgamma poles t1=0.1+0.0001i ...
//
// Arguments are key=value tokens after the subcommand, optionally preceded by
// the function or identity name. A --config file (INI key = value lines)
// supplies defaults; command-line tokens and flags override it.
//
// Exit codes: 0 pass, 1 verification failure, 2 invalid configuration,
// 3 numerical non-convergence.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "lensgamma/lensgamma.hpp"

namespace {

using namespace lensgamma;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_invalid = 2;
constexpr int exit_non_convergence = 3;

[[noreturn]] void invalid(const std::string& what) { raise(ErrorKind::invalid_parameter, what); }

// ---------------------------------------------------------------------------
// Argument access

double parse_double(const std::string& key, std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    invalid("cannot parse '" + std::string(s) + "' as a number for " + key);
  }
  return v;
}

/// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i" (spaces ignored).
cplx parse_complex(const std::string& key, std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) invalid("empty value for " + key);
  if (s.back() != 'i' && s.back() != 'j') return {parse_double(key, s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  if (im.front() == '+') im.erase(0, 1);
  return {re.empty() ? 0.0 : parse_double(key, re), parse_double(key, im)};
}

std::int64_t parse_int(const std::string& key, std::string_view s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    invalid("cannot parse '" + std::string(s) + "' as an integer for " + key);
  }
  return v;
}

class Args {
 public:
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  double real(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
  }
  cplx complex(const std::string& key, cplx fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_complex(key, it->second);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_int(key, it->second);
  }
  double require_real(const std::string& key) const {
    if (!has(key)) invalid("missing argument " + key);
    return real(key, 0.0);
  }
  template <class T, class Parse>
  std::vector<T> list(const std::string& key, const std::vector<T>& fallback, Parse parse) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<T> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse(key, item));
    return out;
  }

  ordered_json echo() const {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : kv_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, std::string> kv_;
};

NomeParameters nome_parameters(const Args& a) {
  const std::int64_t r = a.integer("r", 1);
  if (a.has("sigma") || a.has("tau")) {
    const cplx sigma = a.complex("sigma", cplx(0.05, 0.5));
    const cplx tau = a.complex("tau", -std::conj(sigma));
    return NomeParameters(sigma, tau, r);
  }
  return NomeParameters::physical(a.real("a", 0.05), a.real("b", 0.5), r);
}

TruncationPolicy truncation_policy(const Args& a) {
  TruncationPolicy p;
  p.term_epsilon = a.real("term_epsilon", p.term_epsilon);
  p.max_product_index = a.integer("max_product_index", p.max_product_index);
  p.max_sum_terms = a.integer("max_sum_terms", p.max_sum_terms);
  p.validate();
  return p;
}

ModelFamily model_family(const Args& a) {
  const std::string f = a.str("family", "elliptic");
  if (f == "elliptic") return ModelFamily::elliptic;
  if (f == "qlimit") return ModelFamily::qlimit;
  if (f == "gamma_limit" || f == "gamma") return ModelFamily::gamma_limit;
  invalid("unknown family '" + f + "' (elliptic, qlimit, gamma_limit)");
}

Spin spin(const Args& a, const std::string& suffix) {
  return Spin{a.real("x" + suffix, 0.0), a.integer("m" + suffix, 0)};
}

Spins three_spins(const Args& a) { return {spin(a, "1"), spin(a, "2"), spin(a, "3")}; }

Alphas three_alphas(const Args& a, double eta) {
  Alphas al{};
  al[0] = a.real("alpha1", eta / 3.0);
  al[1] = a.real("alpha2", eta / 3.0);
  al[2] = a.real("alpha3", eta - al[0] - al[1]);
  return al;
}

FiveTuple five_tuple(const Args& a, const NomeParameters& np) {
  FiveTuple f;
  const std::array<double, 5> re = {0.1, -0.3, 0.25, 0.4, -0.2};
  const double im = 0.12 * np.eta().real();
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string k = std::to_string(i + 1);
    f.t[i] = a.complex("t" + k, cplx(re[i], im));
    f.u[i] = a.integer("u" + k, 0);
  }
  return f;
}

MasterParameters master_parameters(const Args& a, const NomeParameters& np) {
  std::array<cplx, 5> t{};
  std::array<std::int64_t, 5> u{};
  const std::array<double, 5> re = {0.1, -0.3, 0.25, 0.4, -0.2};
  const double im = 2.0 * np.eta().real() / 6.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string k = std::to_string(i + 1);
    t[i] = a.complex("t" + k, cplx(re[i], im));
    u[i] = a.integer("u" + k, 0);
  }
  MasterParameters mp = MasterParameters::from_five(t, u, np);
  if (a.has("t6")) mp.t[5] = a.complex("t6", mp.t[5]);
  if (a.has("u6")) mp.u[5] = a.integer("u6", mp.u[5]);
  return mp;
}

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string format = "json";
  std::optional<std::string> path;
  bool timing = false;
  std::ostringstream buffer;

  void flush() const {
    if (path) {
      std::ofstream f(*path, std::ios::binary);
      if (!f) invalid("cannot open output file " + *path);
      f << buffer.str();
    } else {
      std::cout << buffer.str();
    }
  }
};

void write_reports(Output& out, const std::vector<VerificationReport>& reps) {
  if (out.format == "csv") {
    out.buffer << csv_header(out.timing) << '\n';
    for (const auto& r : reps) out.buffer << csv_row(r, out.timing) << '\n';
  } else {
    for (const auto& r : reps) out.buffer << report_to_json(r, out.timing).dump() << '\n';
  }
}

int exit_code_for(const std::vector<VerificationReport>& reps) {
  bool failed = false;
  bool non_converged = false;
  for (const auto& r : reps) {
    if (r.status == ReportStatus::non_convergence) non_converged = true;
    if ((r.status == ReportStatus::fail && r.gate) || r.status == ReportStatus::invalid_parameter) {
      failed = true;
    }
  }
  if (failed) return exit_fail;
  if (non_converged) return exit_non_convergence;
  return exit_pass;
}

// ---------------------------------------------------------------------------
// eval

struct EvalResult {
  ordered_json value;
  std::optional<Evaluation> meta;
};

EvalResult eval_value(const std::string& fn, const Args& a) {
  const TruncationPolicy pol = truncation_policy(a);
  const auto complex_result = [](const Evaluation& e) { return EvalResult{to_json(e.value), e}; };
  if (fn == "mod_bracket") return {mod_bracket(a.integer("m", 0), a.integer("r", 1)), std::nullopt};
  if (fn == "bracket_pm") return {bracket_pm(a.integer("m", 0), a.integer("r", 1)), std::nullopt};
  if (fn == "epsilon_factor") return {epsilon_factor(a.integer("m", 0), a.integer("r", 1)), std::nullopt};
  if (fn == "qpochhammer_inf") return complex_result(qpochhammer_inf(a.complex("x", 0.0), a.complex("q", 0.0), pol));
  if (fn == "theta4") return complex_result(theta4(a.complex("z", 0.0), a.complex("p", 0.0), pol));
  if (fn == "elliptic_gamma") {
    return complex_result(elliptic_gamma(a.complex("z", 0.0), a.complex("p", 0.0), a.complex("q", 0.0), pol));
  }
  if (fn == "weight_gamma") {
    return {weight_gamma(a.real("alpha", 0.0), spin(a, "i"), spin(a, "j")), std::nullopt};
  }
  if (fn == "single_spin_gamma") return {single_spin_gamma(spin(a, "")), std::nullopt};

  const NomeParameters np = nome_parameters(a);
  if (fn == "lens_elliptic_gamma") {
    return complex_result(lens_elliptic_gamma(a.complex("z", 0.0), a.integer("m", 0), np, pol));
  }
  if (fn == "varphi") return {to_json(varphi(a.complex("z", 0.0), a.integer("m", 0), np)), std::nullopt};
  if (fn == "lens_gamma_appendix") {
    return complex_result(lens_gamma_appendix(a.complex("z", 0.0), a.integer("m", 0), np, pol));
  }
  if (fn == "lens_theta") return complex_result(lens_theta(a.complex("z", 0.0), a.integer("m", 0), np, pol));
  if (fn == "theta_std") return complex_result(theta_std(a.complex("z", 0.0), np, pol));
  if (fn == "kappa_elliptic") return complex_result(kappa_elliptic(a.require_real("alpha"), np, pol));
  if (fn == "weight_elliptic") {
    return complex_result(weight_elliptic(a.require_real("alpha"), spin(a, "i"), spin(a, "j"), np, pol));
  }
  if (fn == "single_spin_elliptic") return complex_result(single_spin_elliptic(spin(a, ""), np, pol));
  if (fn == "q_function") return complex_result(q_function(a.complex("z", 0.0), a.integer("n", 0), np, pol));
  if (fn == "kappa_qlimit") return complex_result(kappa_qlimit(a.require_real("alpha"), np, pol));
  if (fn == "weight_qlimit") {
    return complex_result(weight_qlimit(a.require_real("alpha"), spin(a, "i"), spin(a, "j"), np, pol));
  }
  if (fn == "single_spin_qlimit") return complex_result(single_spin_qlimit(spin(a, ""), np, pol));
  if (fn == "crossing_weight") {
    return {to_json(crossing_weight(model_family(a), a.require_real("alpha"), spin(a, "i"), spin(a, "j"), np, pol)),
            std::nullopt};
  }
  invalid("unknown function '" + fn + "'");
}

int run_eval(const std::string& fn, const Args& a, Output& out) {
  const EvalResult res = eval_value(fn, a);
  if (out.format == "csv") {
    out.buffer << "function,value_re,value_im,tail_bound,max_j,max_k\n";
    double re = 0.0;
    double im = 0.0;
    if (res.value.is_array()) {
      re = res.value[0].get<double>();
      im = res.value[1].get<double>();
    } else {
      re = res.value.get<double>();
    }
    out.buffer << fn << ',' << format_number(re) << ',' << format_number(im) << ','
               << (res.meta ? format_number(res.meta->tail_bound) : "") << ','
               << (res.meta ? std::to_string(res.meta->max_j) : "") << ','
               << (res.meta ? std::to_string(res.meta->max_k) : "") << '\n';
  } else {
    ordered_json j = ordered_json::object();
    j["function"] = fn;
    j["arguments"] = a.echo();
    j["value"] = res.value;
    if (res.meta) {
      j["tail_bound"] = res.meta->tail_bound;
      j["max_j"] = res.meta->max_j;
      j["max_k"] = res.meta->max_k;
    }
    out.buffer << j.dump() << '\n';
  }
  return exit_pass;
}

// ---------------------------------------------------------------------------
// verify

std::vector<VerificationReport> run_identity(const std::string& id, const Args& a, double tol) {
  const TruncationPolicy pol = truncation_policy(a);
  if (id == "brackets") return {verify_bracket_identities(a.integer("r_max", 64))};
  if (id == "strmsg") {
    QuadratureSettings qs;
    qs.policy = pol;
    if (a.has("cutoff")) qs.line.fixed_cutoff = a.real("cutoff", 0.0);
    if (a.has("m_cutoff")) qs.sum.fixed_terms = a.integer("m_cutoff", 0);
    qs.line.tail_correction = qs.sum.tail_correction = a.integer("tail_correction", 1) != 0;
    return {verify_strmsg(three_spins(a), three_alphas(a, 1.0), tol, qs)};
  }
  if (id == "limit_hbar") {
    return {verify_limit_hbar(a.real("alpha", 0.3), a.real("x", 1.0), a.integer("m", 0),
                              a.list<double>("hbar_list", {0.2, 0.1, 0.05}, parse_double), pol)};
  }
  const NomeParameters np = nome_parameters(a);
  QuadratureSettings qs;
  qs.policy = pol;
  const double eta = np.eta().real();
  if (id == "str") return {verify_str(three_spins(a), three_alphas(a, eta), np, tol, qs)};
  if (id == "str_via_master") return {verify_str_via_master(three_spins(a), three_alphas(a, eta), np, tol, qs)};
  if (id == "rinfstr") return {verify_rinfstr(three_spins(a), three_alphas(a, eta), np, tol, qs)};
  if (id == "master") return {verify_master(master_parameters(a, np), tol, qs)};
  if (id == "I_constant") {
    const FiveTuple f = five_tuple(a, np);
    return verify_I_constant(f.t, f.u, np, tol, a.real("shift_tol", 1e-7), qs);
  }
  if (id == "theta_difference") {
    const FiveTuple f = five_tuple(a, np);
    return verify_theta_difference(a.complex("z", cplx(0.37, 0.1)), a.integer("y", 0), f.t, f.u, np, tol, pol);
  }
  if (id == "gamma_phi_bridge") {
    return {verify_gamma_phi_bridge(a.complex("z", cplx(0.3, 0.1)), a.integer("m", 0), np, tol, pol)};
  }
  if (id == "limit_r") {
    return {verify_limit_r_to_inf(a.complex("z", 0.3), a.integer("n", 1), np,
                                  a.list<std::int64_t>("r_list", {4, 8, 16, 32}, parse_int), pol)};
  }
  if (id == "inversion") {
    return {verify_inversion_first(model_family(a), a.real("alpha", 0.3 * eta), spin(a, "1"), spin(a, "2"),
                                   np, tol, pol)};
  }
  if (id == "kappa") return verify_kappa(model_family(a), a.real("alpha", 0.3 * eta), np, tol, pol);
  if (id == "single_spin_forms") return {verify_single_spin_forms(Spin{a.real("x", 0.4), a.integer("m", 1)}, np, tol, pol)};
  invalid("unknown identity '" + id + "'");
}

int run_verify(const std::string& id, const Args& a, Output& out) {
  const IdentityInfo* info = find_identity(id);
  if (info == nullptr) invalid("unknown identity '" + id + "'");
  const double tol = a.real("tol", info->default_tolerance);
  std::vector<VerificationReport> reps;
  int code = exit_pass;
  try {
    reps = run_identity(id, a, tol);
    code = exit_code_for(reps);
  } catch (const Error& e) {
    // A rejected case still produces a report row; the exit code carries the
    // configuration / convergence distinction.
    std::cerr << "lensgamma: " << e.what() << '\n';
    reps = {error_report(id, e)};
    code = e.kind() == ErrorKind::non_convergence ? exit_non_convergence : exit_invalid;
  }
  for (auto& r : reps) r.seed = static_cast<std::uint64_t>(a.integer("seed", 0));
  write_reports(out, reps);
  return code;
}

// ---------------------------------------------------------------------------
// sweep

unsigned worker_count() {
  if (const char* env = std::getenv("LENSGAMMA_WORKERS")) {
    const std::int64_t n = parse_int("LENSGAMMA_WORKERS", env);
    if (n < 1) invalid("LENSGAMMA_WORKERS must be >= 1");
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_sweep_command(const std::string& id, const Args& a, Output& out) {
  const IdentityInfo* info = find_identity(id);
  if (info == nullptr || !info->sweepable) invalid("identity '" + id + "' cannot be swept");
  SweepConfig cfg;
  cfg.identity = id;
  cfg.params = nome_parameters(a);
  cfg.tol = a.real("tol", info->default_tolerance);
  cfg.shift_tol = a.real("shift_tol", cfg.shift_tol);
  const std::int64_t seed = a.integer("seed", 0);
  if (seed < 0) invalid("seed must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.samples = a.integer("samples", 10);
  if (cfg.samples < 1) invalid("samples must be >= 1");
  cfg.im_floor = a.real("im_floor", cfg.im_floor);
  if (!(cfg.im_floor >= 0.0 && cfg.im_floor < 1.0 / 6.0)) invalid("im_floor must lie in [0, 1/6)");
  cfg.family = model_family(a);
  cfg.workers = worker_count();
  const SweepResult res = run_sweep(cfg);
  write_reports(out, res.rows);
  const ordered_json summary = summary_to_json(res.summary, out.timing);
  // Wall time never enters stdout unless requested, so reruns stay byte-identical.
  std::cerr << "lensgamma: sweep " << id << ": " << res.summary.pass_count << '/' << res.summary.rows
            << " pass, runtime " << res.summary.runtime_seconds << " s\n";
  if (out.format == "csv") {
    if (out.path) {
      std::ofstream f(*out.path + ".summary.json", std::ios::binary);
      f << summary.dump() << '\n';
    } else {
      std::cerr << summary.dump() << '\n';
    }
  } else {
    out.buffer << summary.dump() << '\n';
  }
  return exit_code_for(res.rows);
}

// ---------------------------------------------------------------------------
// poles

int run_poles(const Args& a, Output& out) {
  const NomeParameters np = nome_parameters(a);
  const MasterParameters mp = master_parameters(a, np);
  const PoleDiagnostics d = pole_diagnostics(mp, static_cast<std::size_t>(a.integer("keep", 12)));
  const double threshold = pole_margin_fraction * std::abs(np.eta());
  if (out.format == "csv") {
    out.buffer << "set,index,y,re,im,distance\n";
    for (const PoleRecord& p : d.nearest) {
      out.buffer << (p.upper ? "upper" : "lower") << ',' << p.index + 1 << ',' << p.y << ','
                 << format_number(p.location.real()) << ',' << format_number(p.location.imag()) << ','
                 << format_number(p.distance) << '\n';
    }
    return exit_pass;
  }
  ordered_json j = ordered_json::object();
  j["parameters"] = to_json(mp);
  j["margin"] = d.margin;
  j["threshold"] = threshold;
  j["safe"] = d.safe(threshold);
  ordered_json poles = ordered_json::array();
  for (const PoleRecord& p : d.nearest) {
    ordered_json pj = ordered_json::object();
    pj["set"] = p.upper ? "upper" : "lower";
    pj["index"] = p.index + 1;
    pj["y"] = p.y;
    pj["location"] = to_json(p.location);
    pj["distance"] = p.distance;
    poles.push_back(pj);
  }
  j["poles"] = poles;
  out.buffer << j.dump() << '\n';
  return exit_pass;
}

// ---------------------------------------------------------------------------

struct Flags {
  std::vector<std::string> positional;
  std::optional<std::string> identity, sigma, tau, format, out, config;
  std::optional<std::int64_t> r, samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool timing = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("args", f.positional, "[name] key=value ...");
  sub->add_option("--identity", f.identity, "Identity (verify, sweep) or function (eval) name");
  sub->add_option("--r", f.r, "Lens order r >= 1");
  sub->add_option("--sigma", f.sigma, "Modulus sigma, e.g. 0.05+0.5i");
  sub->add_option("--tau", f.tau, "Modulus tau (default -conj(sigma))");
  sub->add_option("--tol", f.tol, "Relative tolerance");
  sub->add_option("--seed", f.seed, "Sweep seed (64-bit)");
  sub->add_option("--samples", f.samples, "Number of sweep samples");
  sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", f.out, "Output file (default stdout)");
  sub->add_option("--config", f.config, "INI file of key = value defaults");
  sub->add_flag("--timing", f.timing, "Include measured runtimes in the output");
}

int dispatch(const std::string& command, const Flags& f) {
  Args args;
  if (f.config) {
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_file(*f.config);
    } catch (const CLI::Error& e) {
      invalid("cannot read config file " + *f.config + ": " + e.what());
    }
    for (const CLI::ConfigItem& item : items) {
      std::string value;
      for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
      args.set(item.name, value);
    }
  }
  std::string name = args.str("identity", "");
  for (const std::string& tok : f.positional) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      name = tok;
    } else {
      args.set(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }
  if (f.identity) name = *f.identity;
  if (f.r) args.set("r", std::to_string(*f.r));
  if (f.sigma) args.set("sigma", *f.sigma);
  if (f.tau) args.set("tau", *f.tau);
  if (f.tol) args.set("tol", format_number(*f.tol));
  if (f.seed) args.set("seed", std::to_string(*f.seed));
  if (f.samples) args.set("samples", std::to_string(*f.samples));

  Output out;
  out.format = f.format.value_or(args.str("format", "json"));
  if (out.format != "json" && out.format != "csv") invalid("format must be json or csv");
  if (f.out) {
    out.path = *f.out;
  } else if (args.has("out")) {
    out.path = args.str("out", "");
  }
  out.timing = f.timing || args.integer("timing", 0) != 0;

  int code = exit_pass;
  if (command == "eval") {
    if (name.empty()) invalid("eval needs a function name");
    code = run_eval(name, args, out);
  } else if (command == "verify") {
    if (name.empty()) invalid("verify needs an identity name");
    code = run_verify(name, args, out);
  } else if (command == "sweep") {
    if (name.empty()) invalid("sweep needs an identity name");
    code = run_sweep_command(name, args, out);
  } else {
    code = run_poles(args, out);
  }
  out.flush();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lensgamma: lens elliptic gamma functions, Boltzmann weights and identity checks"};
  app.require_subcommand(1, 1);
  Flags flags;
  std::string command;
  for (const char* name : {"eval", "verify", "sweep", "poles"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, flags);
    sub->callback([&command, name] { command = name; });
  }
  app.get_subcommand("eval")->description("Evaluate one function and print value and truncation metadata");
  app.get_subcommand("verify")->description("Verify one identity and print its report(s)");
  app.get_subcommand("sweep")->description("Run a seeded randomized sweep of one identity");
  app.get_subcommand("poles")->description("List contour-adjacent poles and the safety margin");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_pass : exit_invalid;
  }
  try {
    return dispatch(command, flags);
  } catch (const Error& e) {
    std::cerr << "lensgamma: " << e.what() << '\n';
    return e.kind() == ErrorKind::non_convergence ? exit_non_convergence : exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "lensgamma: " << e.what() << '\n';
    return exit_invalid;
  }
}
