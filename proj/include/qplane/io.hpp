#pragma once

// Serialization. JSON numbers use nlohmann's shortest round-trip output; CSV
// numbers use a fixed 17-significant-digit scientific format.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/bounds.hpp"
#include "qplane/certify.hpp"
#include "qplane/qmatrix.hpp"
#include "qplane/spectrum.hpp"

namespace qplane::io {

using nlohmann::json;

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline json matrix_header(const QMatrix& q) {
  return {{"k", q.window().k()},
          {"n", q.n()},
          {"precision", to_string(q.precision())},
          {"phi_mode", to_string(q.phi_mode())},
          {"max_abs_entry", q.max_abs_entry()}};
}

/// Row-major "re,im" pairs, one matrix row per line.
inline std::string matrix_csv(const QMatrix& q) {
  std::string out;
  const std::size_t n = q.n();
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = q.row(r);
    for (std::size_t c = 0; c < n; ++c) {
      if (c) out += ',';
      out += csv_number(row[c].real());
      out += ',';
      out += csv_number(row[c].imag());
    }
    out += '\n';
  }
  return out;
}

inline json spectrum_json(int k, const SpectrumResult& s) {
  return {{"k", k}, {"eigenvalues", s.eigenvalues}, {"residuals", s.residuals}, {"iterations", s.iterations}};
}

inline json ledger_json(const ErrorLedger& l) {
  const auto& a = l.assumptions;
  return {{"n", l.n},
          {"delta", l.delta},
          {"eps", l.eps},
          {"eps_r", l.eps_r},
          {"alpha", l.alpha},
          {"beta", l.beta},
          {"norm_sq_num", l.norm_sq_num},
          {"max_abs_entry", l.max_abs_entry},
          {"rayleigh_num", l.rayleigh_num},
          {"error_bound", l.error_bound},
          {"assumptions",
           {{"delta_le_0.1", a.delta_small},
            {"eps_le_delta", a.eps_below_delta},
            {"n_eps_le_delta", a.n_eps_below_delta},
            {"norm_check", a.norm_check},
            {"entries_lt_1", a.entries_below_one}}},
          {"failed_assumptions", a.failed()}};
}

inline json verdict_json(int k, const Verdict& v) {
  return {{"k", k},
          {"certified_lower_bound", v.certified_lower_bound},
          {"exceeded_one", v.exceeded_one},
          {"lambda_reference", v.lambda_reference},
          {"ledger", ledger_json(v.ledger)}};
}

struct OracleCheck {
  std::string check;
  json params;
  double value = 0.0;
  double reference = 0.0;
  double gap = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline json oracle_json(const OracleCheck& c) {
  return {{"check", c.check}, {"params", c.params}, {"value", c.value}, {"reference", c.reference},
          {"gap", c.gap},     {"tol", c.tol},       {"pass", c.pass}};
}

inline json enclosure_json(const EnclosureReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"index", x.index}, {"value", x.value}, {"bound", x.bound}});
  return {{"pass", r.pass},
          {"margin_lower", r.margin_lower},
          {"margin_upper", r.margin_upper},
          {"margin_wb_lower", r.margin_wb_lower},
          {"margin_wb_upper", r.margin_wb_upper},
          {"violations", v}};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qplane::io
