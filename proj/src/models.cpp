#include "fichain/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace fichain {

std::size_t state_cap_from_env() {
  if (const char* raw = std::getenv("FICHAIN_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(raw, &end, 10);
    if (end && *end == '\0' && parsed > 0) return std::size_t(parsed);
    throw SpecParseError("FICHAIN_STATE_CAP is not a positive integer");
  }
  return kDefaultStateCap;
}

GraphSpec GraphSpec::cycle(int n) {
  if (n < 3) throw SpecParseError("cycle needs n >= 3");
  GraphSpec g{n, {}, "cycle:" + std::to_string(n)};
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

GraphSpec GraphSpec::path(int n) {
  if (n < 2) throw SpecParseError("path needs n >= 2");
  GraphSpec g{n, {}, "path:" + std::to_string(n)};
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  return g;
}

GraphSpec GraphSpec::complete(int n) {
  if (n < 2) throw SpecParseError("complete needs n >= 2");
  GraphSpec g{n, {}, "complete:" + std::to_string(n)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
  return g;
}

GraphSpec GraphSpec::torus(int n, int d) {
  if (n < 3 || d < 1) throw SpecParseError("torus needs n >= 3, d >= 1");
  double size = 1.0;
  for (int k = 0; k < d; ++k) size *= n;
  if (size > 1e6) throw SpecParseError("torus too large");
  const int total = int(size);

  GraphSpec g{total, {}, "torus:" + std::to_string(n) + ":" + std::to_string(d)};
  std::set<std::pair<int, int>> seen;
  for (int v = 0; v < total; ++v) {
    int rest = v, stride = 1;
    for (int k = 0; k < d; ++k) {
      const int coord = rest % n;
      rest /= n;
      const int up = v + ((coord + 1) % n - coord) * stride;
      auto key = std::minmax(v, up);
      if (seen.insert({key.first, key.second}).second)
        g.edges.emplace_back(key.first, key.second);
      stride *= n;
    }
  }
  return g;
}

GraphSpec GraphSpec::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto as_int = [&](const std::string& s) {
    try {
      return std::stoi(s);
    } catch (...) {
      throw SpecParseError("bad integer in graph spec '" + spec + "'");
    }
  };
  if (parts.size() == 2 && parts[0] == "cycle") return cycle(as_int(parts[1]));
  if (parts.size() == 2 && parts[0] == "path") return path(as_int(parts[1]));
  if (parts.size() == 2 && parts[0] == "complete") return complete(as_int(parts[1]));
  if (parts.size() == 3 && parts[0] == "torus")
    return torus(as_int(parts[1]), as_int(parts[2]));
  throw SpecParseError("unknown graph spec '" + spec + "'");
}

void GraphSpec::validate() const {
  if (vertices < 2) throw SpecParseError("graph needs at least 2 vertices");
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices)
      throw SpecParseError("edge endpoint out of range");
    if (a == b) throw SpecParseError("self-loops are not allowed");
    if (!seen.insert(std::minmax(a, b)).second)
      throw SpecParseError("duplicate edge");
  }
}

std::vector<int> GraphSpec::degrees() const {
  std::vector<int> deg(vertices, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

bool GraphSpec::connected() const {
  if (vertices == 0) return false;
  std::vector<std::vector<int>> adj(vertices);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(vertices, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++reached;
        queue.push_back(y);
      }
  }
  return reached == vertices;
}

ReversibleChain build_graph_walk(const GraphSpec& graph) {
  graph.validate();
  if (!graph.connected()) throw Disconnected("graph is not connected");
  const int n = graph.vertices;
  const std::vector<int> deg = graph.degrees();
  Matrix rates = Matrix::Zero(n, n);
  for (auto [a, b] : graph.edges) {
    rates(a, b) = 1.0 / deg[a];
    rates(b, a) = 1.0 / deg[b];
  }
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  return ReversibleChain::build(rates, std::nullopt, std::move(labels));
}

ReversibleChain build_lamplighter(const GraphSpec& graph, std::size_t state_cap) {
  graph.validate();
  if (!graph.connected()) throw Disconnected("graph is not connected");
  const int nv = graph.vertices;
  if (nv > 20) throw StateSpaceTooLarge("lamplighter on more than 20 vertices");
  const std::size_t configs = std::size_t(1) << nv;
  const std::size_t n = std::size_t(nv) * configs;
  if (n > state_cap)
    throw StateSpaceTooLarge("lamplighter needs " + std::to_string(n) +
                             " states, cap is " + std::to_string(state_cap));

  const std::vector<int> deg = graph.degrees();
  std::vector<std::vector<int>> adj(nv);
  for (auto [a, b] : graph.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }

  auto index = [&](int i, std::size_t sigma) {
    return Eigen::Index(std::size_t(i) * configs + sigma);
  };

  Matrix rates = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));
  std::vector<std::string> labels(n);
  for (int i = 0; i < nv; ++i) {
    for (std::size_t sigma = 0; sigma < configs; ++sigma) {
      const Eigen::Index from = index(i, sigma);
      rates(from, index(i, sigma ^ (std::size_t(1) << i))) = 0.5;
      for (int j : adj[i]) rates(from, index(j, sigma)) = 0.5 / deg[i];

      std::string lamps(nv, '0');
      for (int v = 0; v < nv; ++v)
        if (sigma & (std::size_t(1) << v)) lamps[v] = '1';
      labels[from] = std::to_string(i) + "|" + lamps;
    }
  }
  return ReversibleChain::build(rates, std::nullopt, std::move(labels));
}

ZrpSpec ZrpSpec::mean_field(int n, int m, double slope) {
  if (n < 2 || m < 1) throw SpecParseError("zrp needs n >= 2 sites, m >= 1");
  if (!(slope > 0)) throw SpecParseError("zrp rate slope must be positive");
  ZrpSpec spec;
  spec.sites = n;
  spec.particles = m;
  spec.G = Matrix::Constant(n, n, 1.0 / n);
  spec.rate_table.assign(n, {});
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= m; ++k) spec.rate_table[i].push_back(slope * k);
  spec.delta = slope;
  spec.Delta = slope;
  return spec;
}

std::vector<std::vector<int>> zrp_states(int sites, int particles) {
  std::vector<std::vector<int>> states;
  std::vector<int> current(sites, 0);
  // colex: recurse over the last site first
  auto rec = [&](auto&& self, int site, int remaining) -> void {
    if (site == 0) {
      current[0] = remaining;
      states.push_back(current);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      current[site] = k;
      self(self, site - 1, remaining - k);
    }
  };
  rec(rec, sites - 1, particles);
  std::sort(states.begin(), states.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              for (int i = int(a.size()) - 1; i >= 0; --i)
                if (a[i] != b[i]) return a[i] < b[i];
              return false;
            });
  return states;
}

ReversibleChain build_zrp(const ZrpSpec& spec, std::size_t state_cap) {
  const int n = spec.sites, m = spec.particles;
  if (n < 2 || m < 1) throw SpecParseError("zrp needs n >= 2 sites, m >= 1");
  if (spec.G.rows() != n || spec.G.cols() != n)
    throw SpecParseError("G must be n x n");
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (spec.G(i, j) < 0) throw GNotStochastic("G has negative entries");
      row += spec.G(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw GNotStochastic("row " + std::to_string(i) + " of G sums to " +
                           std::to_string(row));
  }
  if (int(spec.rate_table.size()) != n)
    throw SpecParseError("need one rate function per site");
  for (int i = 0; i < n; ++i) {
    const auto& r = spec.rate_table[i];
    if (int(r.size()) < m)
      throw SpecParseError("rate function at site " + std::to_string(i) +
                           " must cover k = 1.." + std::to_string(m));
    double prev = 0.0;  // r_i(0) = 0
    for (int k = 0; k < m; ++k) {
      if (!(r[k] > 0)) throw SpecParseError("rates must be positive");
      const double inc = r[k] - prev;
      if (inc < spec.delta * (1.0 - 1e-12) || inc > spec.Delta * (1.0 + 1e-12))
        throw RatesViolateIncrements(
            "increment r(" + std::to_string(k + 1) + ") - r(" +
            std::to_string(k) + ") = " + std::to_string(inc) +
            " outside [delta, Delta] at site " + std::to_string(i));
      prev = r[k];
    }
  }

  const auto states = zrp_states(n, m);
  if (states.size() > state_cap)
    throw StateSpaceTooLarge("zrp needs " + std::to_string(states.size()) +
                             " states, cap is " + std::to_string(state_cap));
  std::map<std::vector<int>, int> index;
  for (std::size_t s = 0; s < states.size(); ++s) index[states[s]] = int(s);

  const Eigen::Index ns = Eigen::Index(states.size());
  Matrix rates = Matrix::Zero(ns, ns);
  std::vector<std::string> labels(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& x = states[s];
    std::string label;
    for (int i = 0; i < n; ++i)
      label += (i ? "," : "") + std::to_string(x[i]);
    labels[s] = label;

    for (int i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i || spec.G(i, j) == 0.0) continue;
        std::vector<int> y = x;
        --y[i];
        ++y[j];
        rates(Eigen::Index(s), index.at(y)) += spec.rate_table[i][x[i] - 1] * spec.G(i, j);
      }
    }
  }
  return ReversibleChain::build(rates, std::nullopt, std::move(labels));
}

ReversibleChain build_trivial(const Vector& pi) {
  const Eigen::Index n = pi.size();
  if (n < 2) throw Error("trivial chain needs at least 2 states");
  Vector normalized = pi / pi.sum();
  Matrix rates = Matrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      if (x != y) rates(x, y) = normalized[y];
  return ReversibleChain::build(rates, normalized);
}

double spectral_gap_of_G(const Matrix& G) {
  const Eigen::Index n = G.rows();
  if (G.cols() != n || n < 2) throw Error("G must be square, n >= 2");
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (G(i, j) < 0) throw GNotStochastic("G has negative entries");
      if (std::abs(G(i, j) - G(j, i)) >
          1e-12 * std::max(std::abs(G(i, j)), std::abs(G(j, i))))
        throw NotSymmetric("G is not symmetric");
      row += G(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12) throw GNotStochastic("G rows must sum to 1");
  }
  // connectivity of the off-diagonal support
  {
    std::vector<char> seen(n, 0);
    std::deque<Eigen::Index> queue{0};
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!queue.empty()) {
      const Eigen::Index x = queue.front();
      queue.pop_front();
      for (Eigen::Index y = 0; y < n; ++y)
        if (y != x && G(x, y) > 0 && !seen[y]) {
          seen[y] = 1;
          ++reached;
          queue.push_back(y);
        }
    }
    if (reached != n) throw Reducible("G is reducible");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (G + G.transpose()),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
  return 1.0 - solver.eigenvalues()[n - 2];
}

}  // namespace fichain
