#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fichain/errors.hpp"

namespace fichain {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Directed allowed transition (Q(from,to) > 0). The support is always
/// symmetric, so every edge appears in both orientations.
struct Edge {
  int from = 0;
  int to = 0;
  friend bool operator==(const Edge& a, const Edge& b) {
    return a.from == b.from && a.to == b.to;
  }
};

/// A strictly positive, finite function on the state space.
class Observable {
 public:
  explicit Observable(Vector values);

  const Vector& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  Eigen::Index size() const { return values_.size(); }

 private:
  Vector values_;
};

Vector log_vec(const Vector& v);
Vector sqrt_vec(const Vector& v);

/// Irreducible Markov generator Q on a finite state space, reversible with
/// respect to a probability measure pi. Immutable after construction; cheap
/// to copy and safe to share across threads.
class ReversibleChain {
 public:
  /// Relative tolerance for the detailed-balance check
  /// |pi(x)Q(x,y) - pi(y)Q(y,x)| <= tol * max(...).
  static constexpr double kDetailedBalanceTol = 1e-10;

  /// Builds a chain from an n x n rate matrix. Diagonal entries are ignored.
  /// If pi is absent it is computed by propagating detailed balance along a
  /// BFS spanning tree of the support graph (exact for reversible chains)
  /// and then verified on all remaining edges.
  static ReversibleChain build(const Matrix& rates,
                               std::optional<Vector> pi = std::nullopt,
                               std::vector<std::string> labels = {});

  int size() const;
  const std::vector<std::string>& labels() const;
  const Matrix& rates() const;
  const Vector& pi() const;
  /// Directed edges in row-major order of the rate matrix.
  const std::vector<Edge>& edges() const;
  const std::vector<std::vector<int>>& neighbors() const;

  double rate(int x, int y) const;
  /// Total jump rate Q(x) = sum_{y != x} Q(x,y).
  double total_rate(int x) const;
  /// Edge conductance c(x,y) = pi(x) Q(x,y).
  double conductance(int x, int y) const;

  /// All-pairs graph distances on the support, computed once on first use.
  const Eigen::MatrixXi& vertex_distances() const;

 private:
  struct Impl;
  explicit ReversibleChain(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Sparsity parameter p = min over edges of Q(x,y) / max(Q(x), Q(y,x)).
/// In the stochastic case (Q(x) = 1 everywhere) this is the minimum
/// transition probability. Always in (0, 1].
double sparsity(const ReversibleChain& chain);

/// Dirichlet form E(f,g) = (1/2) sum_{x,y} pi(x) Q(x,y) (f(x)-f(y)) (g(x)-g(y)).
double dirichlet(const ReversibleChain& chain, const Vector& f, const Vector& g);

/// E[f] with respect to pi.
double mean(const ReversibleChain& chain, const Vector& f);

/// Ent(f) = E[f log f] - E[f] log E[f], evaluated in the equivalent form
/// sum_x pi(x) * (f(x) log(f(x)/E[f]) - f(x) + E[f]) whose summands are all
/// nonnegative, so near-constant inputs do not suffer cancellation.
double entropy(const ReversibleChain& chain, const Observable& f);

/// Var(f) = E[f^2] - E[f]^2, evaluated as E[(f - E[f])^2].
double variance(const ReversibleChain& chain, const Vector& f);

/// Graph distances between states and between directed edges.
/// d(e,e') is the minimum of l-1 over walks (x0,...,xl) whose first edge is
/// e and last edge is e'; equivalently 0 if e == e' and
/// 1 + vertex_dist(head(e), tail(e')) otherwise.
struct DistanceTables {
  Eigen::MatrixXi vertex_dist;
  /// Materialized |E| x |E| table (indices follow chain.edges() order);
  /// empty if |E| exceeded the materialization limit.
  Eigen::MatrixXi edge_dist;
};

DistanceTables distances(const ReversibleChain& chain,
                         int edge_matrix_limit = 1024);

/// d(e,e') for two directed edges, via the vertex-distance table.
int edge_distance(const Eigen::MatrixXi& vertex_dist, const Edge& e,
                  const Edge& ep);

}  // namespace fichain
