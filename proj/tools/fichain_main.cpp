// fichain: compute and verify functional-inequality constants (Poincare,
// modified log-Sobolev, log-Sobolev) for finite reversible Markov chains.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fichain/chain_io.hpp"
#include "fichain/functional.hpp"
#include "fichain/models.hpp"
#include "fichain/regularization.hpp"
#include "fichain/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct OptimizerFlags {
  int starts = 32;
  int max_iters = 10000;
  double tol = 1e-10;
  std::uint64_t seed = 42;

  void attach(CLI::App* cmd) {
    cmd->add_option("--starts", starts, "optimizer starts");
    cmd->add_option("--max-iters", max_iters, "ascent iterations per start");
    cmd->add_option("--tol", tol, "relative improvement stopping tolerance");
    cmd->add_option("--seed", seed, "global seed");
  }
  fichain::OptimizerConfig config() const { return {starts, max_iters, tol, seed}; }
};

void emit(const fichain::Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    fichain::write_json_file(out_path, j);
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

fichain::Json estimate_to_json(const fichain::ConstantEstimate& est,
                               bool include_witness) {
  fichain::Json j;
  j["value"] = est.value;
  j["kind"] = fichain::to_string(est.kind);
  if (est.kind == fichain::EstimateKind::certified_lower_bound) {
    j["converged"] = est.meta.converged;
    j["total_iters"] = est.meta.total_iters;
    j["start_values"] = est.meta.start_values;
    if (include_witness && est.witness) {
      fichain::Json w = fichain::Json::array();
      for (Eigen::Index i = 0; i < est.witness->size(); ++i)
        w.push_back((*est.witness)[i]);
      j["witness"] = std::move(w);
    }
  }
  return j;
}

int cmd_build(const std::string& model_path, const std::string& model_inline,
              const std::string& out_path) {
  fichain::Json spec;
  if (!model_inline.empty()) {
    try {
      spec = fichain::Json::parse(model_inline);
    } catch (const fichain::Json::exception& e) {
      throw fichain::SpecParseError(std::string("inline model spec: ") + e.what());
    }
  } else {
    spec = fichain::read_json_file(model_path);
  }
  const fichain::ReversibleChain chain =
      fichain::chain_from_spec(spec, fichain::state_cap_from_env());
  emit(fichain::chain_to_json(chain), out_path);
  std::cerr << "built chain with " << chain.size() << " states\n";
  return kExitOk;
}

int cmd_compute(const std::string& spec_path, const std::string& constants_csv,
                const OptimizerFlags& flags, const std::string& out_path) {
  const fichain::ReversibleChain chain = fichain::chain_from_spec(
      fichain::read_json_file(spec_path), fichain::state_cap_from_env());

  bool want_rel = false, want_mls = false, want_ls = false;
  {
    std::stringstream ss(constants_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "rel") want_rel = true;
      else if (item == "mls") want_mls = true;
      else if (item == "ls") want_ls = true;
      else throw fichain::SpecParseError("unknown constant '" + item + "'");
    }
  }

  const double p = fichain::sparsity(chain);
  fichain::Json report;
  report["chain"] = {{"description", spec_path},
                     {"n_states", chain.size()},
                     {"p", p}};
  report["config"] = {{"starts", flags.starts},
                      {"max_iters", flags.max_iters},
                      {"tol_opt", flags.tol},
                      {"seed", flags.seed}};

  fichain::Json constants;
  std::optional<fichain::ConstantEstimate> mls;
  if (want_rel) constants["t_rel"] = estimate_to_json(fichain::t_rel(chain), false);
  if (want_mls) {
    mls = fichain::estimate_tmls(chain, flags.config());
    constants["t_mls"] = estimate_to_json(*mls, true);
  }
  if (want_ls)
    constants["t_ls"] =
        estimate_to_json(fichain::estimate_tls(chain, flags.config()), true);
  report["constants"] = std::move(constants);

  fichain::Json analytic;
  if (p <= 0.5) {
    const double r = fichain::default_r(chain);
    analytic["r"] = r;
    analytic["H_r"] = fichain::h_constant(r);
    if (mls)
      analytic["theorem1_upper_bound"] =
          fichain::theorem1_upper_bound(chain, mls->value);
  }
  const double pi_star = chain.pi().minCoeff();
  if (pi_star < 0.5 * (1.0 - 1e-12))
    analytic["poor_upper_bound"] = fichain::poor_upper_bound(chain);
  report["bounds"] = std::move(analytic);

  emit(report, out_path);
  return kExitOk;
}

int cmd_verify(const std::string& spec_path, const std::string& suite_csv,
               int samples, const OptimizerFlags& flags,
               const std::string& out_path) {
  const fichain::ReversibleChain chain = fichain::chain_from_spec(
      fichain::read_json_file(spec_path), fichain::state_cap_from_env());
  if (samples <= 0)
    std::cerr << "warning: samples=0, all checks pass vacuously\n";

  const fichain::VerificationReport report = fichain::run_verification(
      chain, spec_path, fichain::parse_suite(suite_csv), samples, flags.seed,
      flags.config());

  for (const fichain::CheckRecord& check : report.checks)
    std::cerr << (check.pass ? "pass" : "FAIL") << "  " << check.name
              << "  min_margin=" << format_number(check.min_margin)
              << (check.detail.empty() ? "" : "  [" + check.detail + "]")
              << "\n";

  emit(fichain::report_to_json(report), out_path);
  return report.pass ? kExitOk : kExitCheckFailed;
}

struct ScanRow {
  std::string family;
  std::string param;
  std::string error;
  int n_states = 0;
  double p = 0.0;
  std::optional<double> gamma;
  double t_rel = 0.0;
  fichain::ConstantEstimate mls, ls;
  std::optional<double> theorem1, poor;
  std::optional<double> mls_gamma_per_vertex;
  std::optional<double> oracle_tls;
};

void scan_constants(const fichain::ReversibleChain& chain,
                    const OptimizerFlags& flags, ScanRow& row) {
  row.n_states = chain.size();
  row.p = fichain::sparsity(chain);
  row.t_rel = fichain::t_rel(chain).value;
  row.mls = fichain::estimate_tmls(chain, flags.config());
  row.ls = fichain::estimate_tls(chain, flags.config());
  if (row.p <= 0.5)
    row.theorem1 = fichain::theorem1_upper_bound(chain, row.mls.value);
  if (chain.pi().minCoeff() < 0.5 * (1.0 - 1e-12))
    row.poor = fichain::poor_upper_bound(chain);
}

int cmd_scan(const std::string& family, const std::string& range,
             int zrp_sites, double zrp_slope, const std::string& pistar_csv,
             const OptimizerFlags& flags, const std::string& out_path) {
  int lo = 0, hi = -1;
  if (!range.empty()) {
    if (std::sscanf(range.c_str(), "%d:%d", &lo, &hi) != 2 || lo > hi)
      throw fichain::SpecParseError("range must be 'a:b' with a <= b");
  }

  std::vector<ScanRow> rows;
  auto scan_one = [&](const std::string& param,
                      const std::function<fichain::ReversibleChain()>& make,
                      const std::function<void(const fichain::ReversibleChain&,
                                               ScanRow&)>& extras) {
    ScanRow row;
    row.family = family;
    row.param = param;
    try {
      const fichain::ReversibleChain chain = make();
      scan_constants(chain, flags, row);
      if (extras) extras(chain, row);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  };

  if (family == "lamplighter_cycle") {
    if (range.empty()) throw fichain::SpecParseError("--range required");
    for (int n = lo; n <= hi; ++n) {
      scan_one(std::to_string(n),
               [&] {
                 return fichain::build_lamplighter(fichain::GraphSpec::cycle(n),
                                                   fichain::state_cap_from_env());
               },
               [&](const fichain::ReversibleChain&, ScanRow& row) {
                 const auto walk =
                     fichain::build_graph_walk(fichain::GraphSpec::cycle(n));
                 row.gamma = fichain::spectral_gap_of_G(walk.rates());
                 row.mls_gamma_per_vertex = row.mls.value * *row.gamma / n;
               });
    }
  } else if (family == "graph_walk_cycle" || family == "graph_walk_complete") {
    if (range.empty()) throw fichain::SpecParseError("--range required");
    const bool cycle = family == "graph_walk_cycle";
    for (int n = lo; n <= hi; ++n) {
      scan_one(std::to_string(n),
               [&] {
                 return fichain::build_graph_walk(
                     cycle ? fichain::GraphSpec::cycle(n)
                           : fichain::GraphSpec::complete(n));
               },
               [](const fichain::ReversibleChain& chain, ScanRow& row) {
                 // regular graphs: the walk kernel itself is symmetric
                 row.gamma = fichain::spectral_gap_of_G(chain.rates());
               });
    }
  } else if (family == "zrp_meanfield") {
    if (range.empty()) throw fichain::SpecParseError("--range required");
    for (int m = lo; m <= hi; ++m) {
      scan_one(std::to_string(m),
               [&] {
                 return fichain::build_zrp(
                     fichain::ZrpSpec::mean_field(zrp_sites, m, zrp_slope),
                     fichain::state_cap_from_env());
               },
               [&](const fichain::ReversibleChain&, ScanRow& row) {
                 row.gamma = 1.0;  // mean-field kernel
               });
    }
  } else if (family == "trivial_twopoint") {
    if (pistar_csv.empty()) throw fichain::SpecParseError("--pistar required");
    std::stringstream ss(pistar_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const double pi_star = std::stod(item);
      if (!(pi_star > 0.0 && pi_star < 0.5))
        throw fichain::SpecParseError("pistar must be in (0, 1/2)");
      scan_one(item,
               [&] {
                 Eigen::Vector2d pi(pi_star, 1.0 - pi_star);
                 return fichain::build_trivial(pi);
               },
               [&](const fichain::ReversibleChain&, ScanRow& row) {
                 row.oracle_tls =
                     std::log(1.0 / pi_star - 1.0) / (1.0 - 2.0 * pi_star);
               });
    }
  } else {
    throw fichain::SpecParseError("unknown scan family '" + family + "'");
  }

  std::ostringstream csv;
  csv << "family,param,n_states,p,gamma_G,t_rel,t_mls,mls_converged,t_ls,"
         "ls_converged,theorem1_bound,poor_bound,mls_gamma_per_vertex,"
         "oracle_tls,error\n";
  auto opt = [&](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  for (const ScanRow& row : rows) {
    if (!row.error.empty()) {
      csv << row.family << "," << row.param << ",,,,,,,,,,,,,\"" << row.error
          << "\"\n";
      continue;
    }
    csv << row.family << "," << row.param << "," << row.n_states << ","
        << format_number(row.p) << "," << opt(row.gamma) << ","
        << format_number(row.t_rel) << "," << format_number(row.mls.value) << ","
        << (row.mls.meta.converged ? 1 : 0) << "," << format_number(row.ls.value)
        << "," << (row.ls.meta.converged ? 1 : 0) << "," << opt(row.theorem1)
        << "," << opt(row.poor) << "," << opt(row.mls_gamma_per_vertex) << ","
        << opt(row.oracle_tls) << ",\n";
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw fichain::Error("cannot write '" + out_path + "'");
    out << csv.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional-inequality constants for finite reversible Markov "
               "chains"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "turn a model spec into an "
                                            "explicit chain file");
  std::string model_path, model_inline, build_out;
  build->add_option("--model", model_path, "model spec JSON file");
  build->add_option("--model-json", model_inline, "inline model spec JSON");
  build->add_option("--out", build_out, "output chain file (default stdout)");

  // compute
  auto* compute = app.add_subcommand("compute", "estimate t_REL, t_MLS, t_LS "
                                                "and the analytic bounds");
  std::string compute_spec, constants_csv = "rel,mls,ls", compute_out;
  OptimizerFlags compute_flags;
  compute->add_option("--spec", compute_spec, "chain spec file")->required();
  compute->add_option("--constants", constants_csv, "subset of rel,mls,ls");
  compute->add_option("--out", compute_out, "output report (default stdout)");
  compute_flags.attach(compute);

  // verify
  auto* verify = app.add_subcommand("verify", "sampled verification of the "
                                              "regularization inequalities");
  std::string verify_spec, suite_csv = "all", verify_out;
  int samples = 500;
  OptimizerFlags verify_flags;
  verify->add_option("--spec", verify_spec, "chain spec file")->required();
  verify->add_option("--suite", suite_csv, "comma list of checks, or 'all'");
  verify->add_option("--samples", samples, "random observables per check");
  verify->add_option("--out", verify_out, "output report (default stdout)");
  verify_flags.attach(verify);

  // scan
  auto* scan = app.add_subcommand("scan", "sweep a model family, one CSV row "
                                          "per instance");
  std::string family, range, pistar_csv, scan_out;
  int zrp_sites = 3;
  double zrp_slope = 1.0;
  OptimizerFlags scan_flags;
  scan->add_option("--family", family,
                   "lamplighter_cycle | graph_walk_cycle | graph_walk_complete "
                   "| zrp_meanfield | trivial_twopoint")
      ->required();
  scan->add_option("--range", range, "parameter range a:b");
  scan->add_option("--n", zrp_sites, "zrp: number of sites");
  scan->add_option("--slope", zrp_slope, "zrp: linear rate slope");
  scan->add_option("--pistar", pistar_csv, "trivial: comma list of pi_star");
  scan->add_option("--out", scan_out, "output CSV (default stdout)");
  scan_flags.attach(scan);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      if (model_path.empty() == model_inline.empty())
        throw fichain::SpecParseError("give exactly one of --model / --model-json");
      return cmd_build(model_path, model_inline, build_out);
    }
    if (compute->parsed())
      return cmd_compute(compute_spec, constants_csv, compute_flags, compute_out);
    if (verify->parsed())
      return cmd_verify(verify_spec, suite_csv, samples, verify_flags, verify_out);
    if (scan->parsed())
      return cmd_scan(family, range, zrp_sites, zrp_slope, pistar_csv,
                      scan_flags, scan_out);
  } catch (const fichain::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
