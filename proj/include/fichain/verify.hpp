#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fichain/chain_io.hpp"
#include "fichain/functional.hpp"

namespace fichain {

/// One verified inequality. min_margin is the worst relative margin seen
/// across samples (value / max(|lhs|, |rhs|)); a check passes when it stays
/// above -kVerifyRelTol.
struct CheckRecord {
  std::string name;
  int samples = 0;
  double min_margin = 0.0;
  bool pass = true;
  std::string detail;
};

constexpr double kVerifyRelTol = 1e-12;

struct VerificationReport {
  std::string chain_description;
  int n_states = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<CheckRecord> checks;
  bool pass = true;
  std::map<std::string, double> timings_ms;
};

/// Names accepted in a suite: lsi_vs_mlsi, lemma_r, dirichlet_comparison,
/// entropy_comparison, entropy_lemmas, local_lemma, tmap, kappa, varentropy,
/// pipeline. "all" expands to every one of them.
std::vector<std::string> parse_suite(const std::string& csv);

/// Runs the selected checks over `samples` random observables (including
/// the adversarial spiked ones) with per-sample deterministic seeds.
/// The optimizer config is used only by the "pipeline" check, which needs a
/// modified log-Sobolev estimate.
VerificationReport run_verification(const ReversibleChain& chain,
                                    const std::string& description,
                                    const std::vector<std::string>& suite,
                                    int samples, std::uint64_t seed,
                                    const OptimizerConfig& opt_config = {});

Json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& j);

}  // namespace fichain
