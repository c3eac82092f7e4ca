#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fichain/functional.hpp"
#include "fichain/models.hpp"
#include "test_support.hpp"

using namespace fichain;
using namespace fichain::testing;

TEST_CASE("graph specs: generators and parsing") {
  CHECK(GraphSpec::parse("cycle:5").edges.size() == 5);
  CHECK(GraphSpec::parse("path:4").edges.size() == 3);
  CHECK(GraphSpec::parse("complete:4").edges.size() == 6);
  const auto torus = GraphSpec::parse("torus:3:2");
  CHECK(torus.vertices == 9);
  CHECK(torus.edges.size() == 18);  // 4-regular
  for (int d : torus.degrees()) CHECK(d == 4);
  CHECK_THROWS_AS(GraphSpec::parse("blob:3"), SpecParseError);
  CHECK_THROWS_AS(GraphSpec::parse("cycle:2"), SpecParseError);
  CHECK_THROWS_AS(GraphSpec::parse("cycle:x"), SpecParseError);
}

TEST_CASE("graph walk: degrees drive rates and pi") {
  const auto cycle = build_graph_walk(GraphSpec::cycle(3));
  CHECK(cycle.pi().isApproxToConstant(1.0 / 3.0, 1e-13));
  CHECK(sparsity(cycle) == doctest::Approx(0.5).epsilon(1e-14));
  for (int x = 0; x < 3; ++x) CHECK(cycle.total_rate(x) == doctest::Approx(1.0));

  CHECK(sparsity(build_graph_walk(GraphSpec::complete(4))) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto two = build_graph_walk(GraphSpec::path(2));
  CHECK(two.rate(0, 1) == 1.0);
  CHECK(two.rate(1, 0) == 1.0);

  GraphSpec disconnected{4, {{0, 1}, {2, 3}}, "disconnected"};
  CHECK_THROWS_AS(build_graph_walk(disconnected), Disconnected);
}

TEST_CASE("lamplighter: state count, total rate, uniform pi, sparsity") {
  const auto chain = build_lamplighter(GraphSpec::cycle(3));
  CHECK(chain.size() == 24);  // |V| 2^|V|
  CHECK(chain.pi().isApproxToConstant(1.0 / 24.0, 1e-12));
  CHECK(sparsity(chain) == doctest::Approx(0.25).epsilon(1e-14));  // 1/(2d)
  for (int x = 0; x < chain.size(); ++x)
    CHECK(chain.total_rate(x) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(build_lamplighter(GraphSpec::cycle(3), 10), StateSpaceTooLarge);
}

TEST_CASE("lamplighter on an irregular graph: pi follows the walker degree") {
  const auto chain = build_lamplighter(GraphSpec::path(3));
  CHECK(chain.size() == 24);
  // pi(i, sigma) proportional to deg(i); degrees are (1, 2, 1), 8 configs each
  for (int x = 0; x < chain.size(); ++x) {
    const int vertex = x / 8;
    const double expected = (vertex == 1 ? 2.0 : 1.0) / 32.0;
    CHECK(chain.pi()[x] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(chain.total_rate(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("zrp: two-site single-particle mean field") {
  const auto chain = build_zrp(ZrpSpec::mean_field(2, 1));
  CHECK(chain.size() == 2);
  CHECK(chain.rate(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chain.rate(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(chain.pi()[0] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("zrp: state enumeration is stars-and-bars in colex order") {
  CHECK(zrp_states(3, 3).size() == 10);
  CHECK(build_zrp(ZrpSpec::mean_field(3, 3)).size() == 10);
  const auto states = zrp_states(2, 1);
  CHECK(states[0] == std::vector<int>{1, 0});
  CHECK(states[1] == std::vector<int>{0, 1});
}

TEST_CASE("zrp: transitions conserve particles and have the declared rates") {
  const auto spec = ZrpSpec::mean_field(3, 3);
  const auto chain = build_zrp(spec);
  const auto states = zrp_states(3, 3);
  for (int s = 0; s < chain.size(); ++s) {
    const int sum = std::accumulate(states[s].begin(), states[s].end(), 0);
    CHECK(sum == 3);
    // Q(x) = sum_i r_i(x_i) (1 - G_ii) = m * (1 - 1/n) for linear unit rates
    CHECK(chain.total_rate(s) == doctest::Approx(3.0 * (2.0 / 3.0)).epsilon(1e-13));
  }
  for (const Edge& e : chain.edges()) {
    int moved = 0;
    for (int i = 0; i < 3; ++i)
      moved += std::abs(states[e.from][i] - states[e.to][i]);
    CHECK(moved == 2);  // exactly one particle hops
  }
}

TEST_CASE("zrp: mean-field sparsity satisfies p >= delta/(Delta m n)") {
  for (int n : {2, 3}) {
    for (int m : {1, 2, 3}) {
      const auto chain = build_zrp(ZrpSpec::mean_field(n, m));
      CHECK(sparsity(chain) >= 1.0 / double(m * n) - 1e-13);
    }
  }
}

TEST_CASE("zrp: product-form stationary measure for symmetric G") {
  // heterogeneous rates and a non-mean-field symmetric geometry
  ZrpSpec spec;
  spec.sites = 3;
  spec.particles = 4;
  spec.G.resize(3, 3);
  spec.G << 0.0, 0.5, 0.5,
            0.5, 0.2, 0.3,
            0.5, 0.3, 0.2;
  spec.rate_table = {{1.0, 2.0, 3.0, 4.0},
                     {1.5, 2.5, 3.5, 4.5},
                     {0.5, 1.5, 2.5, 3.5}};
  spec.delta = 0.5;
  spec.Delta = 1.5;
  const auto chain = build_zrp(spec);
  const auto states = zrp_states(3, 4);
  REQUIRE(chain.size() == int(states.size()));

  Vector oracle(chain.size());
  for (int s = 0; s < chain.size(); ++s) {
    double w = 1.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 1; k <= states[s][i]; ++k)
        w /= spec.rate_table[i][k - 1];
    oracle[s] = w;
  }
  oracle /= oracle.sum();
  for (int s = 0; s < chain.size(); ++s)
    CHECK(close_rel(chain.pi()[s], oracle[s], 1e-10));
}

TEST_CASE("zrp: input validation") {
  auto bad_g = ZrpSpec::mean_field(3, 2);
  bad_g.G(0, 0) = 0.9;  // row no longer sums to 1
  CHECK_THROWS_AS(build_zrp(bad_g), GNotStochastic);

  auto bad_rates = ZrpSpec::mean_field(3, 2);
  bad_rates.rate_table[1][1] = 10.0;  // increment 9 with Delta = 1
  CHECK_THROWS_AS(build_zrp(bad_rates), RatesViolateIncrements);

  CHECK_THROWS_AS(build_zrp(ZrpSpec::mean_field(6, 6), 10), StateSpaceTooLarge);
}

TEST_CASE("trivial chain: rates, relaxation time, two-point sparsity") {
  const auto chain = build_trivial((Vector(3) << 0.2, 0.3, 0.5).finished());
  CHECK(chain.rate(0, 1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(chain.rate(2, 0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(t_rel(chain).value == doctest::Approx(1.0).epsilon(1e-12));

  // symmetric two-point trivial chain: Q(x) = 1/2 = Q(y,x), so p = 1
  CHECK(sparsity(build_trivial(Vector::Constant(2, 0.5))) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spectral_gap_of_G: complete kernel, cycle kernel, sign convention") {
  const int n = 5;
  CHECK(spectral_gap_of_G(Matrix::Constant(n, n, 1.0 / n)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const auto cycle_walk = build_graph_walk(GraphSpec::cycle(5));
  CHECK(spectral_gap_of_G(cycle_walk.rates()) ==
        doctest::Approx(1.0 - std::cos(2.0 * M_PI / 5.0)).epsilon(1e-12));

  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(spectral_gap_of_G(swap) == doctest::Approx(2.0).epsilon(1e-12));

  Matrix asym(2, 2);
  asym << 0.5, 0.5, 0.2, 0.8;
  CHECK_THROWS_AS(spectral_gap_of_G(asym), NotSymmetric);
  CHECK_THROWS_AS(spectral_gap_of_G(Matrix::Identity(3, 3)), Reducible);
}
