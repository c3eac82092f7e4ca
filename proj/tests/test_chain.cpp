#include <doctest.h>

#include <cmath>
#include <random>

#include "fichain/chain.hpp"
#include "fichain/functional.hpp"
#include "fichain/sampling.hpp"
#include "test_support.hpp"

using namespace fichain;
using namespace fichain::testing;

TEST_CASE("build: symmetric two-point chain gets uniform pi") {
  const auto chain = make_two_point(1.0, 1.0);
  CHECK(chain.pi()[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chain.pi()[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chain.total_rate(0) == doctest::Approx(1.0));
  CHECK(sparsity(chain) == doctest::Approx(1.0));
}

TEST_CASE("build: asymmetric two-point chain solves pi Q = 0") {
  const auto chain = make_two_point(1.0, 2.0);
  CHECK(chain.pi()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(chain.pi()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("build: rejects one-way support") {
  CHECK_THROWS_AS(make_chain({{0, 1, 0}, {1, 0, 1}, {0, 0, 0}}),
                  SupportNotSymmetric);
}

TEST_CASE("build: rejects disconnected support") {
  CHECK_THROWS_AS(
      make_chain({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}),
      NotIrreducible);
}

TEST_CASE("build: rejects negative rates") {
  CHECK_THROWS_AS(make_chain({{0, -1}, {1, 0}}), NonpositiveRates);
}

TEST_CASE("build: rejects non-reversible cycles (Kolmogorov criterion)") {
  // clockwise product 1, counter-clockwise product 8
  CHECK_THROWS_AS(make_chain({{0, 1, 2}, {2, 0, 1}, {1, 2, 0}}),
                  DetailedBalanceViolated);
}

TEST_CASE("build: rejects pi violating detailed balance") {
  Matrix rates(2, 2);
  rates << 0, 1, 1, 0;
  Vector pi(2);
  pi << 0.3, 0.7;
  CHECK_THROWS_AS(ReversibleChain::build(rates, pi), DetailedBalanceViolated);
}

TEST_CASE("build: diagonal entries are ignored") {
  const auto with = make_chain({{5.0, 1.0}, {1.0, 7.0}});
  const auto without = make_two_point(1.0, 1.0);
  CHECK(with.rate(0, 0) == 0.0);
  CHECK(with.total_rate(0) == without.total_rate(0));
  CHECK(with.pi()[0] == doctest::Approx(0.5));
}

TEST_CASE("observable rejects nonpositive and non-finite entries") {
  CHECK_THROWS_AS(Observable((Vector(2) << 1.0, 0.0).finished()), Error);
  CHECK_THROWS_AS(Observable((Vector(2) << 1.0, -2.0).finished()), Error);
  CHECK_THROWS_AS(
      Observable((Vector(2) << 1.0, std::numeric_limits<double>::infinity())
                     .finished()),
      Error);
  CHECK_THROWS_AS(
      Observable((Vector(2) << 1.0, std::nan("")).finished()), Error);
  // subnormal input is an error, not something to clamp
  CHECK_THROWS_AS(Observable((Vector(2) << 1.0, 1e-320).finished()), Error);
}

TEST_CASE("dirichlet form: hand values and bilinearity") {
  const auto chain = make_two_point(1.0, 1.0);
  const Vector f = (Vector(2) << 0.0, 1.0).finished();
  CHECK(dirichlet(chain, f, f) == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto random_chain = random_reversible_chain(rng, 3, 8);
    const int n = random_chain.size();
    Vector g(n), h(n);
    for (int i = 0; i < n; ++i) {
      g[i] = u(rng);
      h[i] = u(rng);
    }
    const Vector constant = Vector::Constant(n, 1.3);
    CHECK(dirichlet(random_chain, constant, g) == 0.0);

    const double a = u(rng), b = u(rng);
    const Vector af_b = (a * g).array() + b;
    CHECK(close_rel(dirichlet(random_chain, af_b, h),
                    a * dirichlet(random_chain, g, h), 1e-11));
    // symmetry
    CHECK(close_rel(dirichlet(random_chain, g, h), dirichlet(random_chain, h, g),
                    1e-12));
    // E(f,f) = 0 iff constant, by irreducibility
    CHECK(dirichlet(random_chain, g, g) >= 0.0);
    if (variance(random_chain, g) > 1e-12)
      CHECK(dirichlet(random_chain, g, g) > 0.0);
  }
}

TEST_CASE("entropy: hand value, homogeneity, agreement with textbook form") {
  const auto chain = make_two_point(1.0, 1.0);
  const Observable f((Vector(2) << 1.5, 0.5).finished());
  CHECK(entropy(chain, f) == doctest::Approx(0.13081203594113694).epsilon(1e-12));
  CHECK(entropy(chain, Observable(Vector::Constant(2, 3.7))) == 0.0);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto random_chain = random_reversible_chain(rng, 3, 8);
    const int n = random_chain.size();
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    const double ent = entropy(random_chain, Observable(v));
    CHECK(ent >= 0.0);
    const double c = u(rng);
    CHECK(close_rel(entropy(random_chain, Observable(c * v)), c * ent, 1e-12));
    CHECK(close_rel(ent, brute_entropy(random_chain.pi(), v), 1e-10));
  }
}

TEST_CASE("variance: hand value and translation invariance") {
  const auto chain = make_two_point(1.0, 1.0);
  const Vector f = (Vector(2) << 0.0, 1.0).finished();
  CHECK(variance(chain, f) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(variance(chain, Vector::Constant(2, 2.0)) == 0.0);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto random_chain = random_reversible_chain(rng, 3, 8);
    Vector g(random_chain.size());
    for (int i = 0; i < g.size(); ++i) g[i] = u(rng);
    const double shift = u(rng);
    CHECK(close_rel(variance(random_chain, g),
                    variance(random_chain, Vector(g.array() + shift)), 1e-9));
  }
}

TEST_CASE("distances: hand values on small chains") {
  const auto two = make_two_point(1.0, 1.0);
  const auto dt2 = distances(two);
  // edges are (0,1) and (1,0)
  CHECK(dt2.edge_dist(0, 0) == 0);
  CHECK(dt2.edge_dist(0, 1) == 1);
  CHECK(dt2.edge_dist(1, 0) == 1);

  const auto path = make_path3_walk();
  const auto dt = distances(path);
  CHECK(dt.vertex_dist(0, 2) == 2);
  // d((0,1),(1,2)) = 1 via the walk 0 -> 1 -> 2
  int e01 = -1, e12 = -1;
  const auto& edges = path.edges();
  for (int i = 0; i < int(edges.size()); ++i) {
    if (edges[i] == Edge{0, 1}) e01 = i;
    if (edges[i] == Edge{1, 2}) e12 = i;
  }
  REQUIRE(e01 >= 0);
  REQUIRE(e12 >= 0);
  CHECK(dt.edge_dist(e01, e12) == 1);
}

TEST_CASE("distances: agree with brute-force edge BFS; metric properties") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 25; ++trial) {
    const auto chain = random_reversible_chain(rng, 3, 10);
    const auto dt = distances(chain);
    const int n = chain.size();
    const int m = static_cast<int>(chain.edges().size());
    REQUIRE(m <= 200);

    const Eigen::MatrixXi brute = brute_edge_distances(chain);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) CHECK(dt.edge_dist(i, j) == brute(i, j));

    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        CHECK(dt.vertex_dist(x, y) == dt.vertex_dist(y, x));
        CHECK((dt.vertex_dist(x, y) == 0) == (x == y));
        for (int z = 0; z < n; ++z)
          CHECK(dt.vertex_dist(x, z) <=
                dt.vertex_dist(x, y) + dt.vertex_dist(y, z));
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        CHECK((dt.edge_dist(i, j) == 0) == (i == j));
        for (int k = 0; k < m; ++k)
          CHECK(dt.edge_dist(i, k) <= dt.edge_dist(i, j) + dt.edge_dist(j, k));
      }
  }
}

TEST_CASE("random chains satisfy detailed balance and positive pi") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto chain = random_reversible_chain(rng);
    CHECK(chain.pi().minCoeff() > 0.0);
    CHECK(chain.pi().sum() == doctest::Approx(1.0).epsilon(1e-13));
    for (const Edge& e : chain.edges()) {
      const double a = chain.conductance(e.from, e.to);
      const double b = chain.conductance(e.to, e.from);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(a, b));
    }
  }
}

TEST_CASE("4 E(sqrt f, sqrt f) <= E(f, log f) on random chains and observables") {
  std::mt19937_64 rng(16);
  long sample = 0;
  for (int c = 0; c < 25; ++c) {
    const auto chain = random_reversible_chain(rng);
    for (int s = 0; s < 40; ++s, ++sample) {
      const Observable f = random_observable(rng, chain.size(), sample);
      const double lhs =
          4.0 * dirichlet(chain, sqrt_vec(f.values()), sqrt_vec(f.values()));
      const double rhs = dirichlet(chain, f.values(), log_vec(f.values()));
      CHECK(leq_rel(lhs, rhs));
    }
  }
  CHECK(sample >= 1000);
}

TEST_CASE("pointwise identity (u-v) log(u/v) = H(u/v) (sqrt u - sqrt v)^2") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double a = std::exp(u(rng)), b = std::exp(u(rng));
    if (a == b) continue;
    // both sides evaluated in their cancellation-free forms
    const double lhs = (a - b) * std::log1p((a - b) / b);
    const double sq = (a - b) / (std::sqrt(a) + std::sqrt(b));
    const double rhs = h_constant(a / b) * sq * sq;
    CHECK(close_rel(lhs, rhs, 1e-12));
  }
}
