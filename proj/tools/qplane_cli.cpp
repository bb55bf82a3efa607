// qplane: eigenvalues, certification and oracle checks for the quarter-plane
// matrix Q_F.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "qplane/commands.hpp"

namespace {

using qplane::cli::RunConfig;

struct Flags {
  std::string config;
  std::string k;
  std::string k_list;
  std::string m_top;
  std::string delta;
  std::string tol;
  std::string phi_mode;
  std::string out;
  std::string format;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key=value configuration file (flags override it)");
  app->add_option("--k", f.k, "window half-width k (n = 2k+1)");
  app->add_option("--k-list", f.k_list, "list of k, e.g. 3,5,60-80");
  app->add_option("--m-top", f.m_top, "number of largest eigenvalues (default 5)");
  app->add_option("--delta", f.delta, "entrywise error bound delta (default 1e-13)");
  app->add_option("--tol", f.tol, "Rayleigh-quotient increment tolerance (default 1e-14)");
  app->add_option("--phi-mode", f.phi_mode, "phi evaluation: naive|stable|series");
  app->add_option("--out", f.out, "output directory (default .)");
  app->add_option("--format", f.format, "comma list of csv,json,svg");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = qplane::cli::load_config(f.config, c);
  auto set = [&c](const char* key, const std::string& v) {
    if (!v.empty()) qplane::cli::apply_setting(c, key, v);
  };
  set("k-list", f.k_list);
  set("k", f.k);
  set("m-top", f.m_top);
  set("delta", f.delta);
  set("tol", f.tol);
  set("phi-mode", f.phi_mode);
  set("out", f.out);
  set("format", f.format);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = qplane::cli;
  CLI::App app{"Spectral verifier for the quarter-plane matrix Q_F"};
  app.require_subcommand(1);
  Flags flags;

  auto* table = app.add_subcommand("table", "largest and smallest eigenvalues for each k");
  auto* certify = app.add_subcommand("certify", "certified lower bound on the spectral radius (exit 0 iff > 1)");
  auto* plot = app.add_subcommand("plot", "SVG plot of the largest eigenvalue against k");
  auto* oracle = app.add_subcommand("oracle", "run an independent oracle suite");
  auto* delta = app.add_subcommand("estimate-delta", "max entrywise |binary64 - double-double| difference");
  auto* entry = app.add_subcommand("entry", "print one matrix entry a(j,k)");
  auto* matrix = app.add_subcommand("matrix", "export Q_F as CSV with a JSON header");
  for (auto* s : {table, certify, plot, oracle, delta, entry, matrix}) add_common(s, flags);

  std::string suite;
  oracle->add_option("suite", suite, "phi | entries | lambda-trunc | wigner")->required();
  int ej = 0;
  int ek = 0;
  entry->add_option("j", ej, "row index")->required();
  entry->add_option("col", ek, "column index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kUsage;
  }

  try {
    if (*entry) {
      RunConfig c;
      if (!flags.phi_mode.empty()) cli::apply_setting(c, "phi-mode", flags.phi_mode);
      return cli::cmd_entry(ej, ek, c.phi_mode, std::cout);
    }
    const RunConfig c = resolve(flags);
    if (*table) return cli::cmd_table(c, std::cout);
    if (*plot) return cli::cmd_plot(c, std::cout);
    if (*oracle) return cli::cmd_oracle(suite, c, std::cout);
    if (c.k_list.size() != 1) throw cli::UsageError("this command takes a single k");
    const int k = c.k_list.front();
    if (*certify) return cli::cmd_certify(k, c.delta, c.phi_mode, c, std::cout);
    if (*delta) return cli::cmd_estimate_delta(k, c.phi_mode, std::cout);
    if (*matrix) return cli::cmd_matrix(k, c, std::cout);
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const qplane::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kNumericalFailure;
  }
  return cli::kUsage;
}
