#include "fichain/chain.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <sstream>

namespace fichain {

namespace {

bool strictly_positive(double v) { return std::isnormal(v) && v > 0.0; }

std::string describe_pair(int x, int y) {
  std::ostringstream os;
  os << "(" << x << "," << y << ")";
  return os.str();
}

}  // namespace

Observable::Observable(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) throw Error("observable must be non-empty");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!strictly_positive(values_[i])) {
      throw Error("observable entries must be strictly positive, finite and "
                  "normal; got " + std::to_string(values_[i]) + " at index " +
                  std::to_string(i));
    }
  }
}

Vector log_vec(const Vector& v) {
  return v.array().log().matrix();
}

Vector sqrt_vec(const Vector& v) {
  return v.array().sqrt().matrix();
}

struct ReversibleChain::Impl {
  std::vector<std::string> labels;
  Matrix rates;
  Vector pi;
  Vector total_rates;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adjacency;

  mutable std::once_flag dist_once;
  mutable Eigen::MatrixXi vertex_dist;
};

ReversibleChain::ReversibleChain(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

int ReversibleChain::size() const { return static_cast<int>(impl_->pi.size()); }
const std::vector<std::string>& ReversibleChain::labels() const { return impl_->labels; }
const Matrix& ReversibleChain::rates() const { return impl_->rates; }
const Vector& ReversibleChain::pi() const { return impl_->pi; }
const std::vector<Edge>& ReversibleChain::edges() const { return impl_->edges; }
const std::vector<std::vector<int>>& ReversibleChain::neighbors() const {
  return impl_->adjacency;
}

double ReversibleChain::rate(int x, int y) const {
  return x == y ? 0.0 : impl_->rates(x, y);
}

double ReversibleChain::total_rate(int x) const { return impl_->total_rates[x]; }

double ReversibleChain::conductance(int x, int y) const {
  return impl_->pi[x] * rate(x, y);
}

ReversibleChain ReversibleChain::build(const Matrix& rates,
                                       std::optional<Vector> pi,
                                       std::vector<std::string> labels) {
  const Eigen::Index n = rates.rows();
  if (rates.cols() != n) throw Error("rate matrix must be square");
  if (n < 2) throw Error("state space must have at least 2 states");

  auto impl = std::make_shared<Impl>();
  impl->rates = rates;
  for (Eigen::Index x = 0; x < n; ++x) {
    impl->rates(x, x) = 0.0;  // diagonal is irrelevant to the generator
    for (Eigen::Index y = 0; y < n; ++y) {
      const double q = impl->rates(x, y);
      if (!std::isfinite(q) || q < 0.0) {
        throw NonpositiveRates("rate " + describe_pair(int(x), int(y)) +
                               " is negative or not finite");
      }
    }
  }

  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      if ((impl->rates(x, y) > 0.0) != (impl->rates(y, x) > 0.0))
        throw SupportNotSymmetric("edge " + describe_pair(int(x), int(y)) +
                                  " has no reverse edge");

  impl->adjacency.resize(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y)
      if (impl->rates(x, y) > 0.0) {
        impl->edges.push_back({int(x), int(y)});
        impl->adjacency[x].push_back(int(y));
      }
    if (impl->adjacency[x].empty())
      throw NotIrreducible("state " + std::to_string(x) + " has no transitions");
  }

  // connectivity of the (symmetric) support graph == irreducibility
  {
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (int y : impl->adjacency[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++reached;
          queue.push_back(y);
        }
    }
    if (reached != n) throw NotIrreducible("support graph is not connected");
  }

  if (pi) {
    if (pi->size() != n) throw Error("pi has wrong length");
    for (Eigen::Index i = 0; i < n; ++i)
      if (!strictly_positive((*pi)[i]))
        throw Error("pi entries must be strictly positive and finite");
    impl->pi = *pi / pi->sum();
  } else {
    // Propagate detailed balance pi(y) = pi(x) Q(x,y) / Q(y,x) along a BFS
    // spanning tree; every non-tree edge is verified below.
    Vector weights = Vector::Zero(n);
    weights[0] = 1.0;
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    std::deque<int> queue{0};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (int y : impl->adjacency[x])
        if (!seen[y]) {
          seen[y] = 1;
          weights[y] = weights[x] * impl->rates(x, y) / impl->rates(y, x);
          queue.push_back(y);
        }
    }
    impl->pi = weights / weights.sum();
  }

  for (const Edge& e : impl->edges) {
    const double a = impl->pi[e.from] * impl->rates(e.from, e.to);
    const double b = impl->pi[e.to] * impl->rates(e.to, e.from);
    if (std::abs(a - b) > kDetailedBalanceTol * std::max(a, b))
      throw DetailedBalanceViolated("detailed balance fails on edge " +
                                    describe_pair(e.from, e.to));
  }

  impl->total_rates = Vector::Zero(n);
  for (const Edge& e : impl->edges)
    impl->total_rates[e.from] += impl->rates(e.from, e.to);

  if (labels.empty()) {
    labels.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  }
  if (Eigen::Index(labels.size()) != n) throw Error("wrong number of state labels");
  impl->labels = std::move(labels);

  ReversibleChain chain(impl);

  // Consistency with the sparsity definition: from every state the outgoing
  // rates are each at least p * Q(x) and sum to Q(x), so deg(x) <= 1/p.
  const double p = sparsity(chain);
  for (Eigen::Index x = 0; x < n; ++x)
    if (double(impl->adjacency[x].size()) > (1.0 + 1e-9) / p)
      throw Error("degree bound deg <= 1/p violated; inconsistent chain");

  return chain;
}

const Eigen::MatrixXi& ReversibleChain::vertex_distances() const {
  std::call_once(impl_->dist_once, [this] {
    const int n = size();
    auto& d = impl_->vertex_dist;
    d.setConstant(n, n, -1);
    for (int s = 0; s < n; ++s) {
      d(s, s) = 0;
      std::deque<int> queue{s};
      while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (int y : impl_->adjacency[x])
          if (d(s, y) < 0) {
            d(s, y) = d(s, x) + 1;
            queue.push_back(y);
          }
      }
    }
  });
  return impl_->vertex_dist;
}

double sparsity(const ReversibleChain& chain) {
  double p = 1.0;
  for (const Edge& e : chain.edges()) {
    const double denom = std::max(chain.total_rate(e.from), chain.rate(e.to, e.from));
    p = std::min(p, chain.rate(e.from, e.to) / denom);
  }
  return p;
}

double dirichlet(const ReversibleChain& chain, const Vector& f, const Vector& g) {
  if (f.size() != chain.size() || g.size() != chain.size())
    throw Error("observable has wrong length");
  double acc = 0.0;
  for (const Edge& e : chain.edges())
    acc += chain.conductance(e.from, e.to) * (f[e.from] - f[e.to]) *
           (g[e.from] - g[e.to]);
  return 0.5 * acc;
}

double mean(const ReversibleChain& chain, const Vector& f) {
  if (f.size() != chain.size()) throw Error("observable has wrong length");
  return chain.pi().dot(f);
}

namespace detail {

// psi(w) = (1+w) log(1+w) - w  >= 0 for w > -1, with a series evaluation
// near 0 where the direct expression loses all significant digits.
double entropy_kernel(double w) {
  if (std::abs(w) > 0.4) return (1.0 + w) * std::log1p(w) - w;
  double term = 0.5 * w * w;  // k = 2 term of sum_k (-1)^k w^k / (k(k-1))
  double acc = term;
  for (int k = 3; k <= 80; ++k) {
    term *= -w * double(k - 2) / double(k);
    acc += term;
    if (std::abs(term) <= 1e-17 * std::abs(acc)) break;
  }
  return acc;
}

}  // namespace detail

double entropy(const ReversibleChain& chain, const Observable& f) {
  const Vector& v = f.values();
  if (v.size() != chain.size()) throw Error("observable has wrong length");
  const double ef = chain.pi().dot(v);
  double acc = 0.0;
  for (Eigen::Index x = 0; x < v.size(); ++x)
    acc += chain.pi()[x] * detail::entropy_kernel((v[x] - ef) / ef);
  return ef * acc;
}

double variance(const ReversibleChain& chain, const Vector& f) {
  const double ef = mean(chain, f);
  double acc = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    const double d = f[x] - ef;
    acc += chain.pi()[x] * d * d;
  }
  return acc;
}

int edge_distance(const Eigen::MatrixXi& vertex_dist, const Edge& e,
                  const Edge& ep) {
  if (e == ep) return 0;
  return 1 + vertex_dist(e.to, ep.from);
}

DistanceTables distances(const ReversibleChain& chain, int edge_matrix_limit) {
  DistanceTables tables;
  tables.vertex_dist = chain.vertex_distances();
  const auto& edges = chain.edges();
  const int m = static_cast<int>(edges.size());
  if (m <= edge_matrix_limit) {
    tables.edge_dist.resize(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        tables.edge_dist(i, j) = edge_distance(tables.vertex_dist, edges[i], edges[j]);
  }
  return tables;
}

}  // namespace fichain
