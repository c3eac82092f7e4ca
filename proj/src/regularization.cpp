#include "fichain/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fichain/functional.hpp"

namespace fichain {

bool is_regular(const ReversibleChain& chain, const Observable& f, double r,
                double rel_tol) {
  if (r < 1.0) throw Error("regularity needs r >= 1");
  for (const Edge& e : chain.edges())
    if (f[e.from] > r * f[e.to] * (1.0 + rel_tol)) return false;
  return true;
}

double default_r(const ReversibleChain& chain) {
  const double p = sparsity(chain);
  if (p > 0.5 * (1.0 + 1e-12))
    throw TwoPointRegime("sparsity p > 1/2: regularization assumes p <= 1/2");
  return 4.0 / (p * p);
}

RegularizationResult regularize(const ReversibleChain& chain,
                                const Observable& f, double r) {
  if (!(r > 1.0)) throw Error("regularize needs r > 1");
  const int n = chain.size();
  const double log_r = std::log(r);

  Vector phi = log_vec(f.values());
  std::vector<int> t_map(n);
  for (int x = 0; x < n; ++x) t_map[x] = x;

  // Max-plus relaxation: phi(x) >= phi(y) - log r across every edge. At a
  // tie, adopt the smaller argmax index. Each accepted update either raises
  // phi(x) or lowers t_map[x] at equal phi, so the sweep terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Edge& e : chain.edges()) {
      const double candidate = phi[e.to] - log_r;
      if (candidate > phi[e.from] ||
          (candidate == phi[e.from] && t_map[e.to] < t_map[e.from])) {
        phi[e.from] = candidate;
        t_map[e.from] = t_map[e.to];
        changed = true;
      }
    }
  }

  RegularizationResult result{Observable(phi.array().exp().matrix()), r,
                              std::move(phi), std::move(t_map), {}};
  for (int x = 0; x < n; ++x)
    if (result.t_map[x] != x) result.active_set.push_back(x);
  return result;
}

double kappa(const ReversibleChain& chain, double r) {
  if (!(r > 1.0)) throw Error("kappa needs r > 1");
  const auto& vd = chain.vertex_distances();
  const auto& edges = chain.edges();
  const double log_r = std::log(r);

  std::vector<double> c(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    c[i] = chain.conductance(edges[i].from, edges[i].to);

  double worst = 0.0;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const int d = edge_distance(vd, edges[i], edges[j]);
      acc += c[i] * std::exp(-double(d) * log_r);
    }
    worst = std::max(worst, acc / c[j]);
  }
  return worst;
}

Margin verify_lemma_r(const ReversibleChain& chain, const Observable& f, double r) {
  if (!is_regular(chain, f, r))
    throw NotRegular("observable is not r-regular");
  const double lhs = dirichlet(chain, f.values(), log_vec(f.values()));
  const double rhs =
      h_constant(r) * dirichlet(chain, sqrt_vec(f.values()), sqrt_vec(f.values()));
  return {rhs - lhs, std::max(std::abs(lhs), std::abs(rhs))};
}

DirichletComparisonMargins verify_dirichlet_comparison(const ReversibleChain& chain,
                                                       const Observable& f) {
  const RegularizationResult reg = regularize(chain, f, default_r(chain));
  const Vector& fs = reg.f_star.values();

  const double ls_plain = dirichlet(chain, sqrt_vec(f.values()), sqrt_vec(f.values()));
  const double ls_star = dirichlet(chain, sqrt_vec(fs), sqrt_vec(fs));
  const double mls_plain = dirichlet(chain, f.values(), log_vec(f.values()));
  const double mls_star = dirichlet(chain, fs, log_vec(fs));

  DirichletComparisonMargins margins;
  margins.sqrt_form = {4.0 / 3.0 * ls_plain - ls_star,
                       std::max(4.0 / 3.0 * ls_plain, ls_star)};
  margins.mls_form = {4.0 / 3.0 * mls_plain - mls_star,
                      std::max(4.0 / 3.0 * mls_plain, mls_star)};
  return margins;
}

Margin verify_entropy_comparison(const ReversibleChain& chain, const Observable& f) {
  const RegularizationResult reg = regularize(chain, f, default_r(chain));
  const double ent_plain = entropy(chain, f);
  const double ent_star = entropy(chain, reg.f_star);
  return {2.0 * ent_star - ent_plain, std::max(2.0 * ent_star, ent_plain)};
}

EntropyLemmaMargins verify_entropy_lemmas(const ReversibleChain& chain,
                                          const Observable& f) {
  const RegularizationResult reg = regularize(chain, f, default_r(chain));
  const double ent_plain = entropy(chain, f);
  const double ent_star = entropy(chain, reg.f_star);
  const double excess = mean(chain, reg.f_star.values() - f.values());
  const double log6 = std::log(6.0);

  EntropyLemmaMargins margins;
  const double rhs = 6.0 * ent_star + 6.0 * log6 * excess;
  margins.majorant_side = {rhs - 5.0 * ent_plain, std::max(rhs, 5.0 * ent_plain)};
  margins.excess_side = {ent_plain - 3.0 * log6 * excess,
                         std::max(ent_plain, 3.0 * log6 * excess)};
  return margins;
}

std::vector<LocalWitness> verify_local_lemma(const ReversibleChain& chain,
                                             const Observable& f, double r) {
  const RegularizationResult reg = regularize(chain, f, r);
  const Vector log_f = log_vec(f.values());
  const double log_r = std::log(r);
  const auto& vd = chain.vertex_distances();

  std::vector<LocalWitness> witnesses;
  for (const Edge& e : chain.edges()) {
    const int x = e.from, y = e.to;
    if (!(reg.log_f_star[x] <= reg.log_f_star[y])) continue;

    LocalWitness w;
    w.e = e;
    if (reg.t_map[y] == y) {
      w.e_prime = e;
      w.d = 0;
    } else {
      const int y_prime = reg.t_map[y];
      const int k = vd(y, y_prime);
      // penultimate vertex of a geodesic from y to y': smallest-index
      // neighbor of y' at distance k-1 from y
      int x_prime = -1;
      for (int u : chain.neighbors()[y_prime])
        if (vd(y, u) == k - 1) {
          x_prime = u;
          break;
        }
      if (x_prime < 0)
        throw WitnessNotFound("no geodesic predecessor for edge (" +
                              std::to_string(x) + "," + std::to_string(y) + ")");
      w.e_prime = {x_prime, y_prime};
      w.d = k;
    }

    const double shift = double(w.d) * log_r;
    w.lower_margin = reg.log_f_star[x] - (log_f[w.e_prime.from] - shift);
    w.upper_margin = (log_f[w.e_prime.to] - shift) - reg.log_f_star[y];

    const double tol =
        1e-12 * std::max({1.0, std::abs(reg.log_f_star[x]),
                          std::abs(log_f[w.e_prime.from]) + shift,
                          std::abs(log_f[w.e_prime.to]) + shift});
    if (w.lower_margin < -tol || w.upper_margin < -tol)
      throw WitnessNotFound("constructed witness fails for edge (" +
                            std::to_string(x) + "," + std::to_string(y) + ")");
    witnesses.push_back(w);
  }
  return witnesses;
}

Vector tmap_dual_weights(const ReversibleChain& chain,
                         const RegularizationResult& reg) {
  const auto& vd = chain.vertex_distances();
  const double log_r = std::log(reg.r);
  Vector h = Vector::Zero(chain.size());
  for (int x : reg.active_set) {
    const int y = reg.t_map[x];
    h[y] += chain.pi()[x] / chain.pi()[y] *
            std::exp(-double(vd(x, y)) * log_r);
  }
  return h;
}

}  // namespace fichain
