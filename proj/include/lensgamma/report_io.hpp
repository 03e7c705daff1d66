#pragma once

// Serialization of reports. JSON objects mirror VerificationReport field by
// field; CSV flattens complex numbers into _re/_im column pairs. Numbers are
// written in the shortest decimal form that round-trips, and the measured
// runtime is only emitted on request so repeated runs are byte-identical.

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "lensgamma/report.hpp"
#include "lensgamma/sweep.hpp"

namespace lensgamma {

inline ordered_json report_to_json(const VerificationReport& rep, bool include_runtime = false) {
  ordered_json j = ordered_json::object();
  j["identity_name"] = rep.identity_name;
  j["parameters"] = rep.parameters;
  j["lhs"] = to_json(rep.lhs);
  j["rhs"] = to_json(rep.rhs);
  j["abs_residual"] = rep.abs_residual;
  j["rel_residual"] = rep.rel_residual;
  j["tolerance"] = rep.tolerance;
  j["pass"] = rep.pass;
  j["gate"] = rep.gate;
  j["status"] = std::string(to_string(rep.status));
  ordered_json meta = ordered_json::object();
  meta["nodes"] = rep.meta.nodes;
  meta["truncation"] = rep.meta.truncation;
  meta["tail_bound"] = rep.meta.tail_bound;
  meta["quadrature_error"] = rep.meta.quadrature_error;
  meta["converged"] = rep.meta.converged;
  if (include_runtime) meta["runtime_seconds"] = rep.meta.runtime_seconds;
  j["numerics_meta"] = meta;
  j["seed"] = rep.seed;
  j["details"] = rep.details;
  return j;
}

inline ordered_json summary_to_json(const SweepSummary& s, bool include_runtime = false) {
  ordered_json j = ordered_json::object();
  j["identity"] = s.identity;
  j["samples"] = s.samples;
  j["rows"] = s.rows;
  j["pass_count"] = s.pass_count;
  j["fail_count"] = s.fail_count;
  j["non_convergence_count"] = s.non_convergence_count;
  j["contour_violation_count"] = s.contour_violation_count;
  j["invalid_count"] = s.invalid_count;
  j["max_rel_residual"] = s.max_rel_residual;
  if (include_runtime) j["runtime_seconds"] = s.runtime_seconds;
  return ordered_json{{"summary", j}};
}

/// Shortest round-trip decimal form; nan/inf spelled out.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_header(bool include_runtime = false) {
  std::string h =
      "identity_name,status,pass,gate,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual,"
      "tolerance,nodes,truncation,tail_bound,quadrature_error,converged,seed";
  if (include_runtime) h += ",runtime_seconds";
  h += ",parameters,details";
  return h;
}

inline std::string csv_row(const VerificationReport& rep, bool include_runtime = false) {
  std::vector<std::string> f = {rep.identity_name,
                                std::string(to_string(rep.status)),
                                rep.pass ? "true" : "false",
                                rep.gate ? "true" : "false",
                                format_number(rep.lhs.real()),
                                format_number(rep.lhs.imag()),
                                format_number(rep.rhs.real()),
                                format_number(rep.rhs.imag()),
                                format_number(rep.abs_residual),
                                format_number(rep.rel_residual),
                                format_number(rep.tolerance),
                                std::to_string(rep.meta.nodes),
                                std::to_string(rep.meta.truncation),
                                format_number(rep.meta.tail_bound),
                                format_number(rep.meta.quadrature_error),
                                rep.meta.converged ? "true" : "false",
                                std::to_string(rep.seed)};
  if (include_runtime) f.push_back(format_number(rep.meta.runtime_seconds));
  f.push_back(csv_escape(rep.parameters.dump()));
  f.push_back(csv_escape(rep.details.dump()));
  std::string line;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0) line += ',';
    line += f[i];
  }
  return line;
}

}  // namespace lensgamma
