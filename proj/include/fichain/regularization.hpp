#pragma once

#include <vector>

#include "fichain/chain.hpp"

namespace fichain {

/// The r-regular majorant f_star(x) = max_z r^{-d(x,z)} f(z) together with
/// the argmax map T. T is idempotent; its range is exactly the set of states
/// where f_star = f (the complement of the active set).
struct RegularizationResult {
  Observable f_star;
  double r;
  /// log f_star, as computed by the max-plus relaxation. Kept so callers can
  /// compare against r^{-d} products without re-taking logarithms.
  Vector log_f_star;
  /// t_map[x] = argmax state (ties: the state of smallest index).
  std::vector<int> t_map;
  /// States with t_map[x] != x, ascending.
  std::vector<int> active_set;
};

/// True iff f(x) <= r f(y) (* (1 + rel_tol)) across every allowed transition.
bool is_regular(const ReversibleChain& chain, const Observable& f, double r,
                double rel_tol = 1e-12);

/// The regularization parameter r = 4 / p^2; always >= 16 since p <= 1/2.
double default_r(const ReversibleChain& chain);

/// Computes f_star by max-plus Bellman-Ford relaxation of
/// log f_star(x) = max(log f(x), max over neighbors y of log f_star(y) - log r).
/// r^{-d} is never formed directly, so large distances cannot underflow.
RegularizationResult regularize(const ReversibleChain& chain,
                                const Observable& f, double r);

/// kappa = max over e' of (1/c(e')) sum_e c(e) r^{-d(e,e')}, evaluated
/// exactly over the full edge set. At r = default_r it is at most 4/3.
double kappa(const ReversibleChain& chain, double r);

/// One-sided inequality margin: value = RHS - LHS, scale = max(|LHS|,|RHS|).
struct Margin {
  double value = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? value / scale : value; }
  bool pass(double rel_tol = 1e-12) const { return value >= -rel_tol * scale; }
};

/// E(f, log f) <= H(r) E(sqrt f, sqrt f) for r-regular f.
Margin verify_lemma_r(const ReversibleChain& chain, const Observable& f, double r);

/// E(sqrt f_star, sqrt f_star) <= (4/3) E(sqrt f, sqrt f) and
/// E(f_star, log f_star) <= (4/3) E(f, log f), at r = default_r.
struct DirichletComparisonMargins {
  Margin sqrt_form;
  Margin mls_form;
};
DirichletComparisonMargins verify_dirichlet_comparison(const ReversibleChain& chain,
                                                       const Observable& f);

/// Ent(f) <= 2 Ent(f_star) at r = default_r.
Margin verify_entropy_comparison(const ReversibleChain& chain, const Observable& f);

/// 5 Ent(f) <= 6 Ent(f_star) + (6 log 6) E[f_star - f], and
/// (3 log 6) E[f_star - f] <= Ent(f), at r = default_r.
struct EntropyLemmaMargins {
  Margin majorant_side;
  Margin excess_side;
};
EntropyLemmaMargins verify_entropy_lemmas(const ReversibleChain& chain,
                                          const Observable& f);

/// For an edge e = (x,y) with f_star(x) <= f_star(y): the companion edge
/// e' = (x',y') with r^{-d(e,e')} f(x') <= f_star(x) <= f_star(y) <=
/// r^{-d(e,e')} f(y'), built by the constructive recipe (e' = e when
/// f_star(y) = f(y), otherwise via a geodesic to the argmax). Margins are in
/// the log domain.
struct LocalWitness {
  Edge e;
  Edge e_prime;
  int d = 0;
  double lower_margin = 0.0;  // log f_star(x) - (log f(x') - d log r)
  double upper_margin = 0.0;  // (log f(y') - d log r) - log f_star(y)
};

/// Validates the witness for every edge with f_star(x) <= f_star(y); throws
/// WitnessNotFound if some constructed witness fails its inequalities beyond
/// tolerance (that signals an implementation bug, not a math failure).
std::vector<LocalWitness> verify_local_lemma(const ReversibleChain& chain,
                                             const Observable& f, double r);

/// The dual weights h(y) = sum over x in the active set with T(x) = y of
/// (pi(x)/pi(y)) r^{-d(x,y)}. Zero off the range of T. At r = default_r the
/// values are at most 1/3.
Vector tmap_dual_weights(const ReversibleChain& chain,
                         const RegularizationResult& reg);

}  // namespace fichain
