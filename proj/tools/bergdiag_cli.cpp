// Experiment driver over the bergdiag C API. Each subcommand assembles a
// JSON spec, hands it to bd_experiment_run and writes the structured report
// (JSON, or the CSV payload for domain exports). Exit code 0 means every
// assertion in the selected experiment passed.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bergdiag.h"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string output;  // empty: stdout
  std::string format = "json";
  int threads = 0;  // 0: hardware count
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("-o,--output", c.output, "Write the report to this file (default: stdout)");
  cmd->add_option("--format", c.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", c.threads, "Worker threads (default: hardware count)");
}

int emit(const json& spec, const CommonOpts& common) {
  char* report_cstr = nullptr;
  int passed = 0;
  const bd_status status = bd_experiment_run(spec.dump().c_str(), &report_cstr, &passed);
  if (status != BD_OK) {
    std::cerr << "error: " << bd_status_name(status) << ": " << bd_last_error() << "\n";
    return 2;
  }
  std::string report(report_cstr);
  bd_string_free(report_cstr);

  std::string payload = report;
  if (common.format == "csv") {
    const json doc = json::parse(report);
    if (!doc.contains("csv")) {
      std::cerr << "error: experiment '" << spec.at("experiment").get<std::string>()
                << "' has no CSV payload\n";
      return 2;
    }
    payload = doc.at("csv").get<std::string>();
  }
  if (common.output.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(common.output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open '" << common.output << "' for writing\n";
      return 2;
    }
    out << payload;
  }
  if (!passed) std::cerr << "FAILED: one or more assertions did not hold (see report)\n";
  return passed ? 0 : 1;
}

int thread_count(const CommonOpts& c) {
  if (c.threads > 0) return c.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bergdiag: Bergman norms on the unit square and sector, diagonal "
      "derivative series, and holomorphic reconstruction from diagonal jets"};
  app.require_subcommand(1);

  // verify-ahs ---------------------------------------------------------
  CommonOpts c_verify;
  std::string verify_function = "pole -1 2";
  double verify_xmax = 50.0, verify_gate = 0.01;
  bool verify_tighten = false;
  auto* verify = app.add_subcommand(
      "verify-ahs", "Half-line identity: derivative series vs direct area integral");
  verify->add_option("--function", verify_function, "Test function (prefix grammar)");
  verify->add_option("--xmax", verify_xmax, "Truncation of the half-line / sector");
  verify->add_option("--gate", verify_gate, "Relative-gap acceptance gate");
  verify->add_flag("--tighten", verify_tighten,
                   "Re-run with tightened tolerance budget and check the gap halves");
  add_common(verify, c_verify);

  // counterexample -----------------------------------------------------
  CommonOpts c_counter;
  std::vector<double> counter_eps = {1e-2, 1e-3, 1e-4};
  auto* counter = app.add_subcommand(
      "counterexample", "Boundary pole: finite diagonal series, divergent region norm");
  counter->add_option("--eps", counter_eps, "Exclusion radii for the truncated norm");
  add_common(counter, c_counter);

  // equivalence --------------------------------------------------------
  CommonOpts c_equiv;
  auto* equiv = app.add_subcommand(
      "equivalence", "One-diagonal upper bound and two-diagonal ratio band over the family");
  add_common(equiv, c_equiv);

  // coverage -----------------------------------------------------------
  CommonOpts c_cover;
  std::vector<double> cover_q = {2.0, 4.0, 6.0};
  double cover_step = 1e-3, cover_margin = 1e-3;
  bool cover_sweep = false;
  auto* cover = app.add_subcommand("coverage",
                                   "Grid check that OmegaQ ∪ rotated OmegaQ covers the square");
  cover->add_option("--q", cover_q, "Ellipse parameters to test");
  cover->add_option("--step", cover_step, "Grid step");
  cover->add_option("--margin", cover_margin, "Margin from the square's boundary");
  cover->add_flag("--sweep", cover_sweep, "Also sweep q and check monotone coverage");
  add_common(cover, c_cover);

  // margin -------------------------------------------------------------
  CommonOpts c_margin;
  double margin_q = 4.0;
  int margin_samples = 10000;
  auto* margin = app.add_subcommand(
      "margin", "Lower-bound margin y(1/2)+1 along the ellipse boundary");
  margin->add_option("--q", margin_q, "Ellipse parameter");
  margin->add_option("--samples", margin_samples, "Boundary sample count");
  add_common(margin, c_margin);

  // reconstruct ---------------------------------------------------------
  CommonOpts c_recon;
  std::string recon_function = "pole 2 1";
  std::string recon_jets;
  int recon_order = 64, recon_grid = 64, recon_samples = 1000;
  double recon_q = 4.0, recon_tol = 1e-6;
  int recon_seed = 987654321;
  auto* recon = app.add_subcommand(
      "reconstruct", "Disk-chained analytic continuation from diagonal jets");
  recon->add_option("--function", recon_function, "Source function for the diagonal data");
  recon->add_option("--jets", recon_jets, "TabulatedJets JSON file (overrides --function)");
  recon->add_option("--order", recon_order, "Jet order per chart");
  recon->add_option("--grid", recon_grid, "Chebyshev grid points per diagonal");
  recon->add_option("--samples", recon_samples, "Random evaluation points");
  recon->add_option("--q", recon_q, "Region parameter (OmegaQ ∪ rotated)");
  recon->add_option("--tolerance", recon_tol, "Round-trip relative error gate");
  recon->add_option("--seed", recon_seed, "RNG seed");
  add_common(recon, c_recon);

  // domain-export --------------------------------------------------------
  CommonOpts c_export;
  std::vector<std::string> export_domains;
  double export_q = 4.0, export_a = 2.0, export_xmax = 2.0;
  int export_arc = 256;
  auto* exp_cmd = app.add_subcommand("domain-export",
                                     "Boundary polylines (CSV) of the planar domains");
  exp_cmd->add_option("--domains", export_domains,
                      "Domains (default: sector square omega omega-a ellipse-q omega-q omega-q-rot)");
  exp_cmd->add_option("--q", export_q, "Ellipse parameter");
  exp_cmd->add_option("--a", export_a, "Slope parameter of omega-a");
  exp_cmd->add_option("--sector-xmax", export_xmax, "Sector truncation for the export");
  exp_cmd->add_option("--arc-samples", export_arc, "Vertices per curved arc");
  add_common(exp_cmd, c_export);

  // parseval -------------------------------------------------------------
  CommonOpts c_parseval;
  int parseval_deg = 4;
  auto* parseval = app.add_subcommand(
      "parseval", "Weighted-disk identity: coefficient sums vs polar quadrature");
  parseval->add_option("--max-degree", parseval_deg, "Highest monomial degree");
  add_common(parseval, c_parseval);

  // coefficients -----------------------------------------------------------
  CommonOpts c_coeff;
  int coeff_nmax = 10000;
  auto* coeff = app.add_subcommand("coefficients",
                                   "Log-domain coefficient table and its invariants");
  coeff->add_option("--n-max", coeff_nmax, "Table size");
  add_common(coeff, c_coeff);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      json spec = {{"experiment", "verify-ahs"},
                   {"function", verify_function},
                   {"xmax", verify_xmax},
                   {"gate", verify_gate},
                   {"tighten", verify_tighten}};
      return emit(spec, c_verify);
    }
    if (counter->parsed()) {
      json spec = {{"experiment", "counterexample"}, {"eps", counter_eps}};
      return emit(spec, c_counter);
    }
    if (equiv->parsed()) {
      return emit(json{{"experiment", "equivalence"}}, c_equiv);
    }
    if (cover->parsed()) {
      json spec = {{"experiment", "coverage"}, {"q", cover_q},       {"step", cover_step},
                   {"margin", cover_margin},   {"sweep", cover_sweep},
                   {"threads", thread_count(c_cover)}};
      return emit(spec, c_cover);
    }
    if (margin->parsed()) {
      json spec = {{"experiment", "margin"}, {"q", margin_q}, {"samples", margin_samples}};
      return emit(spec, c_margin);
    }
    if (recon->parsed()) {
      json spec = {{"experiment", "reconstruct"},
                   {"function", recon_function},
                   {"order", recon_order},
                   {"grid", recon_grid},
                   {"samples", recon_samples},
                   {"q", recon_q},
                   {"tolerance", recon_tol},
                   {"seed", recon_seed}};
      if (!recon_jets.empty()) spec["jets_json"] = read_file(recon_jets);
      return emit(spec, c_recon);
    }
    if (exp_cmd->parsed()) {
      json spec = {{"experiment", "domain-export"},
                   {"q", export_q},
                   {"a", export_a},
                   {"sector_xmax", export_xmax},
                   {"arc_samples", export_arc}};
      if (!export_domains.empty()) spec["domains"] = export_domains;
      if (c_export.format.empty()) c_export.format = "csv";
      return emit(spec, c_export);
    }
    if (parseval->parsed()) {
      return emit(json{{"experiment", "parseval"}, {"max_degree", parseval_deg}}, c_parseval);
    }
    if (coeff->parsed()) {
      return emit(json{{"experiment", "coefficients"}, {"n_max", coeff_nmax}}, c_coeff);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
