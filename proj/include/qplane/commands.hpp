#pragma once

// Command implementations behind the qplane CLI. Each command writes its
// artifacts into RunConfig::output_dir, echoes a summary to `log`, and
// returns the process exit code.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qplane/bounds.hpp"
#include "qplane/certify.hpp"
#include "qplane/io.hpp"
#include "qplane/oracle.hpp"
#include "qplane/phi.hpp"
#include "qplane/qmatrix.hpp"
#include "qplane/spectrum.hpp"

namespace qplane::cli {

enum ExitCode : int { kSuccess = 0, kVerdictFalse = 1, kUsage = 2, kNumericalFailure = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::vector<int> k_list{70};
  int m_top = 5;
  double delta = kDefaultDelta;
  double tol_eig = 1e-14;
  PhiMode phi_mode = PhiMode::StableForm;
  std::string output_dir = ".";
  std::set<std::string> formats{"csv", "json", "svg"};

  void validate() const {
    if (k_list.empty()) throw UsageError("k list is empty");
    for (int k : k_list) {
      if (k < 0 || k > kMaxWindowHalfWidth) throw UsageError("k out of range: " + std::to_string(k));
    }
    if (m_top < 1) throw UsageError("m_top must be >= 1");
    if (!(delta > 0.0)) throw UsageError("delta must be positive");
    if (!(tol_eig > 0.0)) throw UsageError("tol must be positive");
    for (const auto& f : formats) {
      if (f != "csv" && f != "json" && f != "svg") throw UsageError("unknown format '" + f + "'");
    }
  }

  bool wants(const std::string& fmt) const { return formats.count(fmt) != 0; }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline int parse_int(const std::string& s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

/// "3,5,10-12" -> {3, 5, 10, 11, 12}. Order is preserved, duplicates dropped.
inline std::vector<int> parse_k_list(const std::string& spec) {
  std::vector<int> out;
  for (const auto& item : split(spec, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_int(item));
    } else {
      const int a = parse_int(trim(item.substr(0, dash)));
      const int b = parse_int(trim(item.substr(dash + 1)));
      if (b < a) throw UsageError("empty range '" + item + "'");
      for (int k = a; k <= b; ++k) out.push_back(k);
    }
  }
  std::vector<int> uniq;
  for (int k : out) {
    if (std::find(uniq.begin(), uniq.end(), k) == uniq.end()) uniq.push_back(k);
  }
  if (uniq.empty()) throw UsageError("empty k list");
  return uniq;
}

inline std::set<std::string> parse_formats(const std::string& spec) {
  const auto v = split(spec, ',');
  return {v.begin(), v.end()};
}

/// Apply one key=value setting. Keys mirror the long CLI flags.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "k") {
    c.k_list = {parse_int(value)};
  } else if (key == "k-list" || key == "k_list") {
    c.k_list = parse_k_list(value);
  } else if (key == "m-top" || key == "m_top") {
    c.m_top = parse_int(value);
  } else if (key == "delta") {
    c.delta = parse_double(value);
  } else if (key == "tol" || key == "tol_eig") {
    c.tol_eig = parse_double(value);
  } else if (key == "phi-mode" || key == "phi_mode") {
    try {
      c.phi_mode = parse_phi_mode(value);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (key == "out" || key == "output_dir") {
    c.output_dir = value;
  } else if (key == "format" || key == "formats") {
    c.formats = parse_formats(value);
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

/// Flat key=value text; '#' starts a comment.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

inline std::string path_in(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output_dir);
  return (std::filesystem::path(c.output_dir) / name).string();
}

// ---------------------------------------------------------------- table

struct TableRow {
  int k = 0;
  std::vector<double> lambdas;
  std::vector<double> residuals;
  double lambda_min = 0.0;
  double residual_min = 0.0;
  bool ok = false;
  std::string error;

  bool flagged() const { return ok && !lambdas.empty() && lambdas.front() > 1.0; }
};

inline TableRow compute_row(int k, const RunConfig& c) {
  TableRow row;
  row.k = k;
  try {
    const auto q = QMatrix::build(IndexWindow(k), c.phi_mode);
    const int m = std::min<int>(c.m_top, static_cast<int>(q.n()));
    const auto top = top_eigs(q, m, c.tol_eig);
    const auto bottom = min_eig_pair(q, c.tol_eig);
    row.lambdas = top.eigenvalues;
    row.residuals = top.residuals;
    row.lambda_min = bottom.value;
    row.residual_min = bottom.residual;
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

inline std::vector<TableRow> compute_table(const RunConfig& c) {
  std::vector<TableRow> rows;
  for (int k : c.k_list) rows.push_back(compute_row(k, c));
  return rows;
}

inline std::string table_csv(const std::vector<TableRow>& rows, int m) {
  std::string out = "k";
  for (int i = 1; i <= m; ++i) out += ",lambda_" + std::to_string(i);
  out += ",lambda_min";
  for (int i = 1; i <= m; ++i) out += ",residual_" + std::to_string(i);
  out += ",residual_min,exceeds_one,status\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    for (int i = 0; i < m; ++i) out += "," + (i < static_cast<int>(r.lambdas.size()) ? io::csv_number(r.lambdas[i]) : "");
    out += "," + (r.ok ? io::csv_number(r.lambda_min) : "");
    for (int i = 0; i < m; ++i) {
      out += "," + (i < static_cast<int>(r.residuals.size()) ? io::csv_number(r.residuals[i]) : "");
    }
    out += "," + (r.ok ? io::csv_number(r.residual_min) : "");
    out += r.flagged() ? ",1" : ",0";
    out += r.ok ? ",ok\n" : ",error\n";
  }
  return out;
}

inline io::json table_json(const std::vector<TableRow>& rows) {
  io::json arr = io::json::array();
  for (const auto& r : rows) {
    io::json j = {{"k", r.k}, {"ok", r.ok}};
    if (r.ok) {
      j["eigenvalues"] = r.lambdas;
      j["residuals"] = r.residuals;
      j["lambda_min"] = r.lambda_min;
      j["residual_min"] = r.residual_min;
      j["exceeds_one"] = r.flagged();
    } else {
      j["error"] = r.error;
    }
    arr.push_back(j);
  }
  return {{"rows", arr}};
}

inline int cmd_table(const RunConfig& c, std::ostream& log) {
  c.validate();
  const auto rows = compute_table(c);
  if (c.wants("csv")) io::write_file(path_in(c, "table.csv"), table_csv(rows, c.m_top));
  if (c.wants("json")) io::write_file(path_in(c, "table.json"), table_json(rows).dump(2) + "\n");
  bool all_ok = true;
  for (const auto& r : rows) {
    if (!r.ok) {
      all_ok = false;
      log << "k=" << r.k << " failed: " << r.error << '\n';
      continue;
    }
    char buf[64];
    log << "k=" << r.k << ':';
    for (double l : r.lambdas) {
      std::snprintf(buf, sizeof buf, " %.6f", l);
      log << buf;
    }
    std::snprintf(buf, sizeof buf, " | min %.7f", r.lambda_min);
    log << buf << (r.flagged() ? "  [> 1]" : "") << '\n';
  }
  return all_ok ? kSuccess : kNumericalFailure;
}

// -------------------------------------------------------------- certify

inline int cmd_certify(int k, double delta, PhiMode mode, const RunConfig& c, std::ostream& log) {
  io::json out;
  int code = kSuccess;
  try {
    const Verdict v = certify_counterexample(k, delta, mode, c.tol_eig);
    out = io::verdict_json(k, v);
    code = v.exceeded_one ? kSuccess : kVerdictFalse;
  } catch (const AssumptionViolation& e) {
    out = {{"k", k}, {"error", e.what()}, {"ledger", io::ledger_json(e.ledger())}};
    code = kNumericalFailure;
  } catch (const NumericalError& e) {
    out = {{"k", k}, {"error", e.what()}};
    code = kNumericalFailure;
  }
  const std::string text = out.dump(2) + "\n";
  if (c.wants("json")) io::write_file(path_in(c, "certify_k" + std::to_string(k) + ".json"), text);
  log << text;
  return code;
}

// ----------------------------------------------------------------- plot

/// SVG line plot of the largest eigenvalue against k with the threshold at 1.
inline std::string plot_svg(const std::vector<TableRow>& rows) {
  std::vector<std::pair<int, double>> pts;
  for (const auto& r : rows) {
    if (r.ok && !r.lambdas.empty()) pts.emplace_back(r.k, r.lambdas.front());
  }
  std::sort(pts.begin(), pts.end());
  const double W = 720, H = 440, L = 80, R = 30, T = 30, B = 60;
  double kmin = pts.empty() ? 0 : pts.front().first, kmax = pts.empty() ? 1 : pts.back().first;
  if (kmax == kmin) {
    kmin -= 1;
    kmax += 1;
  }
  double ymin = 1.0, ymax = 1.0;
  for (const auto& [k, l] : pts) {
    ymin = std::min(ymin, l);
    ymax = std::max(ymax, l);
  }
  const double pad = std::max(1e-4, 0.08 * (ymax - ymin));
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double k) { return L + (k - kmin) / (kmax - kmin) * (W - L - R); };
  auto sy = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                W, H, W, H);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n"
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                L, H - B, W - R, H - B, L, T, L, H - B);
  s += buf;
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"end\">%.5f</text>\n", L - 6, sy(y) + 4,
                  y);
    s += buf;
  }
  for (int i = 0; i <= 4; ++i) {
    const double k = kmin + (kmax - kmin) * i / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"middle\">%.0f</text>\n",
                  sx(k), H - B + 16, k);
    s += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" text-anchor=\"middle\">k</text>\n"
                "<text x=\"16\" y=\"%.2f\" font-size=\"13\" transform=\"rotate(-90 16 %.2f)\" "
                "text-anchor=\"middle\">largest eigenvalue</text>\n",
                0.5 * (L + W - R), H - 18, 0.5 * (T + H - B), 0.5 * (T + H - B));
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n",
                L, sy(1.0), W - R, sy(1.0));
  s += buf;
  if (pts.size() > 1) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", sx(pts[i].first), sy(pts[i].second));
      s += buf;
    }
    s += "\"/>\n";
  }
  for (const auto& [k, l] : pts) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n", sx(k), sy(l),
                  l > 1.0 ? "red" : "steelblue");
    s += buf;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].second <= 1.0 && pts[i + 1].second > 1.0) {
      const double xm = 0.5 * (sx(pts[i].first) + sx(pts[i + 1].first));
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>\n"
                    "<text class=\"crossing\" x=\"%.2f\" y=\"%.2f\" font-size=\"12\">crosses 1 between k=%d and "
                    "k=%d</text>\n",
                    xm, T, xm, H - B, xm + 4, T + 14, pts[i].first, pts[i + 1].first);
      s += buf;
    }
  }
  s += "</svg>\n";
  return s;
}

inline int cmd_plot(const RunConfig& c, std::ostream& log) {
  c.validate();
  const auto rows = compute_table(c);
  io::write_file(path_in(c, "lambda1.svg"), plot_svg(rows));
  log << "wrote " << path_in(c, "lambda1.svg") << '\n';
  for (const auto& r : rows) {
    if (!r.ok) return kNumericalFailure;
  }
  return kSuccess;
}

// --------------------------------------------------------------- oracle

inline std::vector<io::OracleCheck> oracle_phi_suite() {
  std::vector<io::OracleCheck> out;
  for (std::int64_t l = -200; l <= 200; ++l) {
    io::OracleCheck c;
    c.check = "phi_quad";
    c.params = {{"l", l}};
    const auto r = phi_quad(l, 1e-11);
    c.value = r.value;
    c.reference = phi_naive(l);
    c.gap = std::abs(c.value - c.reference);
    c.tol = 1e-9;
    c.pass = r.converged && c.gap <= c.tol;
    out.push_back(c);
  }
  return out;
}

inline std::vector<io::OracleCheck> oracle_entries_suite() {
  std::vector<io::OracleCheck> out;
  for (int j = -6; j <= 6; ++j) {
    for (int k = -6; k <= 6; ++k) {
      io::OracleCheck c;
      c.check = "decomposition";
      c.params = {{"j", j}, {"k", k}};
      const auto v = entry_via_decomposition(j, k, 1e-10);
      const auto ref = entry(j, k);
      c.value = std::abs(v);
      c.reference = std::abs(ref);
      c.gap = std::abs(v - ref);
      c.tol = 1e-7;
      c.pass = c.gap <= c.tol;
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<io::OracleCheck> oracle_lambda_suite() {
  std::vector<io::OracleCheck> out;
  const std::pair<int, int> cells[] = {{5, 5}, {0, 1}, {0, -1}, {2, -1}, {-1, 3}, {3, 1}};
  for (const auto& [j, k] : cells) {
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {50.0, 100.0, 200.0, 400.0}) {
      io::OracleCheck c;
      c.check = "lambda_truncation";
      c.params = {{"j", j}, {"k", k}, {"lambda", lam}};
      const auto v = entry_via_lambda(j, k, lam, 1e-9);
      c.value = std::abs(v);
      c.reference = std::abs(entry(j, k));
      c.gap = std::abs(v - entry(j, k));
      // Nonincreasing in lambda, and within 0.01 at the largest lambda.
      c.tol = lam == 400.0 ? std::min(prev, 0.01) : prev;
      c.pass = c.gap <= c.tol;
      prev = c.gap;
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<io::OracleCheck> oracle_wigner_suite(int k, const std::vector<double>& a_list) {
  std::vector<io::OracleCheck> out;
  const auto q = QMatrix::build(IndexWindow(k));
  const auto top = top_eigs(q, 1);
  const auto u = StepFunction::from_eigenvector(q.window(), top.eigenvectors.front());
  const double ref = step_quadratic_form(q, u).real();
  double prev = std::numeric_limits<double>::infinity();
  for (double a : a_list) {
    io::OracleCheck c;
    c.check = "wigner_rectangle";
    c.params = {{"k", k}, {"a", a}};
    c.value = wigner_rect_integral(u, a);
    c.reference = ref;
    c.gap = std::abs(c.value - ref);
    // The gap must shrink as the square grows.
    c.tol = std::isfinite(prev) ? prev : c.gap;
    c.pass = c.gap < prev;
    prev = c.gap;
    out.push_back(c);
  }
  return out;
}

inline int cmd_oracle(const std::string& suite, const RunConfig& c, std::ostream& log) {
  std::vector<io::OracleCheck> checks;
  if (suite == "phi") {
    checks = oracle_phi_suite();
  } else if (suite == "entries") {
    checks = oracle_entries_suite();
  } else if (suite == "lambda-trunc") {
    checks = oracle_lambda_suite();
  } else if (suite == "wigner") {
    const int k = c.k_list.size() == 1 ? c.k_list.front() : 3;
    checks = oracle_wigner_suite(k, {10.0, 20.0, 40.0});
  } else {
    throw UsageError("unknown oracle suite '" + suite + "' (phi|entries|lambda-trunc|wigner)");
  }
  io::json arr = io::json::array();
  std::size_t failed = 0;
  for (const auto& ch : checks) {
    arr.push_back(io::oracle_json(ch));
    if (!ch.pass) ++failed;
  }
  const io::json report = {{"suite", suite}, {"checks", arr}, {"failed", failed}, {"pass", failed == 0}};
  if (c.wants("json")) io::write_file(path_in(c, "oracle_" + suite + ".json"), report.dump(2) + "\n");
  log << "oracle " << suite << ": " << checks.size() - failed << '/' << checks.size() << " checks passed\n";
  return failed == 0 ? kSuccess : kVerdictFalse;
}

// --------------------------------------------------------- small commands

inline int cmd_estimate_delta(int k, PhiMode mode, std::ostream& log) {
  const double d = estimate_delta(k, mode);
  const io::json j = {{"k", k}, {"phi_mode", to_string(mode)}, {"delta_estimate", d}};
  log << j.dump() << '\n';
  return kSuccess;
}

inline int cmd_entry(int j, int k, PhiMode mode, std::ostream& log) {
  const auto a = entry(j, k, mode);
  const io::json out = {{"j", j}, {"k", k}, {"re", a.real()}, {"im", a.imag()}};
  log << out.dump() << '\n';
  return kSuccess;
}

inline int cmd_matrix(int k, const RunConfig& c, std::ostream& log) {
  const auto q = QMatrix::build(IndexWindow(k), c.phi_mode);
  const std::string stem = "matrix_k" + std::to_string(k);
  io::write_file(path_in(c, stem + ".json"), io::matrix_header(q).dump(2) + "\n");
  io::write_file(path_in(c, stem + ".csv"), io::matrix_csv(q));
  log << "wrote " << path_in(c, stem + ".csv") << '\n';
  return kSuccess;
}

}  // namespace qplane::cli
