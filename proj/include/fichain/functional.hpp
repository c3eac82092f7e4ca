#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fichain/chain.hpp"

namespace fichain {

enum class EstimateKind { exact, certified_lower_bound, analytic_upper_bound };

const char* to_string(EstimateKind kind);

struct OptimizerConfig {
  int starts = 32;
  int max_iters = 10000;
  double tol_opt = 1e-10;   // relative improvement per accepted step
  std::uint64_t seed = 42;  // per-start seeds are derived from this
};

struct OptimizerMeta {
  int starts = 0;
  long long total_iters = 0;
  /// Best ratio reached by each start, in start order.
  std::vector<double> start_values;
  /// True when the best quarter of the starts agree within 0.5% relative.
  bool converged = false;
};

/// A numeric value for one of the functional-inequality constants, together
/// with how it should be read. Certified lower bounds carry the observable
/// achieving the reported ratio; recomputing the ratio at the witness
/// reproduces the value.
struct ConstantEstimate {
  double value = 0.0;
  EstimateKind kind = EstimateKind::exact;
  std::optional<Observable> witness;
  OptimizerMeta meta;
};

/// Poincare constant t_REL = 1/gap, where gap is the smallest nonzero
/// eigenvalue of -Q viewed as a self-adjoint operator on L2(pi).
ConstantEstimate t_rel(const ReversibleChain& chain);

/// Certified lower bound on the log-Sobolev constant
/// t_LS = sup_f Ent(f) / E(sqrt f, sqrt f), by multistart gradient ascent
/// over f = exp(g) with E[f] = 1 enforced after each step. Always a valid
/// lower bound regardless of convergence.
ConstantEstimate estimate_tls(const ReversibleChain& chain,
                              const OptimizerConfig& config = {});

/// Certified lower bound on the modified log-Sobolev constant
/// t_MLS = sup_f Ent(f) / E(f, log f).
ConstantEstimate estimate_tmls(const ReversibleChain& chain,
                               const OptimizerConfig& config = {});

/// H(r) = ((sqrt r + 1)/(sqrt r - 1)) log r, extended by continuity with
/// H(1) = 4. Satisfies H(u) = H(1/u) and increases on [1, inf).
double h_constant(double r);

/// Upper bound t_LS <= 20 t_MLS log(1/p). Requires p <= 1/2; otherwise the
/// chain has at most two states and the two-point oracle applies.
double theorem1_upper_bound(const ReversibleChain& chain, double tmls_value);

/// Classical bound t_LS <= t_REL * log(1/pi_star - 1) / (1 - 2 pi_star),
/// from comparison with the trivial chain Q(x,y) = pi(y).
double poor_upper_bound(const ReversibleChain& chain);

/// Slack Ent(g) - E[g h] of the dual certificate h in the variational
/// characterization Ent(g) = max { E[gh] : E[e^h] <= 1 }. Nonnegative for
/// every admissible h, zero at h = log(g / E[g]).
double entropy_dual_gap(const ReversibleChain& chain, const Observable& g,
                        const Vector& h);

/// Objectives of the two ratio maximizations as functions of g (f = exp g),
/// and their exact gradients in g. Exposed so the gradients can be validated
/// against finite differences.
double lsi_objective(const ReversibleChain& chain, const Vector& g);
Vector lsi_gradient(const ReversibleChain& chain, const Vector& g);
double mlsi_objective(const ReversibleChain& chain, const Vector& g);
Vector mlsi_gradient(const ReversibleChain& chain, const Vector& g);

}  // namespace fichain
