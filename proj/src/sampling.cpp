#include "fichain/sampling.hpp"

#include <cmath>

namespace fichain {

Observable random_observable(std::mt19937_64& rng, int n, long sample_index) {
  std::uniform_real_distribution<double> uniform(-3.0, 3.0);
  Vector f(n);
  for (int i = 0; i < n; ++i) f[i] = std::exp(uniform(rng));
  if (sample_index % 5 == 4) f[int((sample_index / 5) % n)] *= 1e3;
  return Observable(std::move(f));
}

ReversibleChain random_reversible_chain(std::mt19937_64& rng, int min_states,
                                        int max_states) {
  std::uniform_int_distribution<int> size_dist(min_states, max_states);
  std::uniform_real_distribution<double> conductance(0.1, 2.0);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const int n = size_dist(rng);
  Matrix c = Matrix::Zero(n, n);
  for (int v = 1; v < n; ++v) {
    // random spanning tree keeps the support connected
    std::uniform_int_distribution<int> parent_dist(0, v - 1);
    const int u = parent_dist(rng);
    c(u, v) = c(v, u) = conductance(rng);
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (c(u, v) == 0.0 && coin(rng) < 0.25)
        c(u, v) = c(v, u) = conductance(rng);

  Matrix rates = Matrix::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    const double w = weight(rng);
    for (int v = 0; v < n; ++v) rates(u, v) = c(u, v) / w;
  }
  return ReversibleChain::build(rates);
}

}  // namespace fichain
