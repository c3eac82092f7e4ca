#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fichain/chain.hpp"

namespace fichain {

/// Default cap on built state spaces; dense eigendecompositions and the
/// |E|^2 kappa evaluation stay tractable below it. Overridable through the
/// FICHAIN_STATE_CAP environment variable (see state_cap_from_env).
constexpr std::size_t kDefaultStateCap = 20000;

std::size_t state_cap_from_env();

/// Simple connected graph, either explicit or from a named generator:
/// "cycle:n", "path:n", "complete:n", "torus:n:d".
struct GraphSpec {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // unordered pairs, 0-based
  std::string name;

  static GraphSpec cycle(int n);
  static GraphSpec path(int n);
  static GraphSpec complete(int n);
  static GraphSpec torus(int n, int d);
  static GraphSpec parse(const std::string& spec);

  std::vector<int> degrees() const;
  bool connected() const;
  void validate() const;
};

/// Simple random walk: Q(x,y) = 1/deg(x) for y ~ x, pi proportional to deg.
ReversibleChain build_graph_walk(const GraphSpec& graph);

/// Lamplighter chain on the graph: states are (walker position, lamp
/// configuration); the walker flips its lamp at rate 1/2 and moves to each
/// neighbor at rate 1/(2 deg). Total rate 1 everywhere. State order is
/// vertex-major with the lamp configuration read as a binary integer.
ReversibleChain build_lamplighter(const GraphSpec& graph,
                                  std::size_t state_cap = kDefaultStateCap);

/// Zero-range process: m particles on n sites; a site holding k >= 1
/// particles expels one at rate r_i(k) toward a destination drawn from row i
/// of G. Reversible for symmetric G.
struct ZrpSpec {
  int sites = 0;
  int particles = 0;
  Matrix G;
  /// rate_table[i][k-1] = r_i(k) for k = 1..particles (r_i(0) = 0 forced).
  std::vector<std::vector<double>> rate_table;
  /// Declared increment bounds: delta <= r_i(k+1) - r_i(k) <= Delta.
  double delta = 0.0;
  double Delta = 0.0;

  /// Mean-field geometry G_ij = 1/n with linear rates r(k) = slope * k
  /// (so delta = Delta = slope).
  static ZrpSpec mean_field(int n, int m, double slope = 1.0);
};

ReversibleChain build_zrp(const ZrpSpec& spec,
                          std::size_t state_cap = kDefaultStateCap);

/// Occupation vectors {x in Z_+^n : sum x = m} in colex order; this is the
/// state enumeration used by build_zrp.
std::vector<std::vector<int>> zrp_states(int sites, int particles);

/// The chain Q(x,y) = pi(y) for x != y; mixes in one jump, t_REL = 1.
ReversibleChain build_trivial(const Vector& pi);

/// Spectral gap gamma(G) = 1 - lambda_2 of a symmetric stochastic matrix,
/// where lambda_2 is the second-largest eigenvalue.
double spectral_gap_of_G(const Matrix& G);

}  // namespace fichain
