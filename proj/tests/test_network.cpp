#include <catch2/catch_amalgamated.hpp>

#include <brue/brue.hpp>

using namespace brue;

TEST_CASE("cost polynomials evaluate, differentiate, integrate") {
  const CostPolynomial p({1.0, 0.5, 2.0});  // 1 + x/2 + 2x^2
  CHECK(p(0.0) == 1.0);
  CHECK(p(2.0) == Catch::Approx(1.0 + 1.0 + 8.0));
  CHECK(p.slope(2.0) == Catch::Approx(0.5 + 8.0));
  CHECK(p.integral(1.0) == Catch::Approx(1.0 + 0.25 + 2.0 / 3.0));
  CHECK(CostPolynomial{}.degree() == -1);
  CHECK(CostPolynomial{}(3.0) == 0.0);
  CHECK(CostPolynomial::constant(4.0).is_constant());
  CHECK_THROWS_AS(CostPolynomial({-1.0}), InvalidNetwork);
}

TEST_CASE("mixing polynomials averages coefficients") {
  const CostPolynomial a({1.0});        // 1
  const CostPolynomial b({0.0, 2.0});   // 2x
  const CostPolynomial m = mix({&a, &b}, {0.25, 0.75});
  CHECK(m(1.0) == Catch::Approx(0.25 + 1.5));
  CHECK(m(0.0) == Catch::Approx(0.25));
}

TEST_CASE("network construction validates its input") {
  std::vector<Edge> edges{{"e", 0, 1, CostPolynomial({1.0})}};
  CHECK_NOTHROW(Network({"s", "t"}, edges, {{0, 1, 1.0}}));
  // duplicate edge id
  std::vector<Edge> dup{{"e", 0, 1, CostPolynomial({1.0})}, {"e", 0, 1, CostPolynomial({1.0})}};
  CHECK_THROWS_AS(Network({"s", "t"}, dup, {{0, 1, 1.0}}), InvalidNetwork);
  // vertex index out of range
  std::vector<Edge> oob{{"e", 0, 7, CostPolynomial({1.0})}};
  CHECK_THROWS_AS(Network({"s", "t"}, oob, {{0, 1, 1.0}}), InvalidNetwork);
  // nonpositive demand
  CHECK_THROWS_AS(Network({"s", "t"}, edges, {{0, 1, -1.0}}), InvalidNetwork);
  // unreachable destination
  CHECK_THROWS_AS(Network({"s", "t"}, edges, {{1, 0, 1.0}}), NoPath);
}

TEST_CASE("path enumeration is complete and ordered") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  REQUIRE(paths.count() == 3);
  const auto ids = wheatstone_paths(paths);
  CHECK(paths.path(ids.up).edges.size() == 2);
  CHECK(paths.path(ids.middle).edges.size() == 3);
  CHECK(paths.path(ids.down).edges.size() == 2);

  const Network two = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  CHECK(enumerate_paths(two).count() == 2);

  // the chain's long trip multiplies paths: 3 per copy plus 3^n through routes
  const Network chain = make_wheatstone_chain(2, 0.1);
  CHECK(enumerate_paths(chain).count() == 3 + 3 + 9);
  CHECK_THROWS_AS(enumerate_paths(chain, 5), PathExplosion);
}

TEST_CASE("path flows validate demand and aggregate to edges") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  CHECK_THROWS_AS(PathFlow(w, paths, {0.5, 0.5, 0.5}), InvalidFlow);
  CHECK_THROWS_AS(PathFlow(w, paths, {1.5, 0.0, -0.5}), InvalidFlow);

  const auto ids = wheatstone_paths(paths);
  std::vector<double> v(3, 0.0);
  v[static_cast<std::size_t>(ids.middle)] = 1.0;
  const PathFlow mid(w, paths, v);
  const auto ef = mid.edge_flows();
  double on = 0.0, off = 0.0;
  for (int e = 0; e < w.edge_count(); ++e) {
    bool used = false;
    for (int pe : paths.path(ids.middle).edges) used = used || pe == e;
    (used ? on : off) += ef[static_cast<std::size_t>(e)];
  }
  CHECK(on == Catch::Approx(3.0));
  CHECK(off == 0.0);
}

TEST_CASE("social cost and potential at hand-computed flows") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  const auto ids = wheatstone_paths(paths);

  std::vector<double> even(3, 0.0);
  even[static_cast<std::size_t>(ids.up)] = 0.5;
  even[static_cast<std::size_t>(ids.down)] = 0.5;
  const PathFlow ue(w, paths, even);
  CHECK(social_cost(ue) == Catch::Approx(1.0));
  CHECK(potential(ue) == Catch::Approx(0.75));

  std::vector<double> all_mid(3, 0.0);
  all_mid[static_cast<std::size_t>(ids.middle)] = 1.0;
  const PathFlow mid(w, paths, all_mid);
  CHECK(social_cost(mid) == Catch::Approx(2.0));
  CHECK(potential(mid) == Catch::Approx(1.0));
}

TEST_CASE("indifference threshold measures used-path regret") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  const auto ids = wheatstone_paths(paths);

  std::vector<double> even(3, 0.0);
  even[static_cast<std::size_t>(ids.up)] = 0.5;
  even[static_cast<std::size_t>(ids.down)] = 0.5;
  CHECK(epsilon_threshold(PathFlow(w, paths, even)) == Catch::Approx(0.0).margin(1e-12));

  std::vector<double> all_mid(3, 0.0);
  all_mid[static_cast<std::size_t>(ids.middle)] = 1.0;
  CHECK(epsilon_threshold(PathFlow(w, paths, all_mid)) == Catch::Approx(0.5));

  // hair of flow below the support tolerance does not count as a used path
  std::vector<double> hair = even;
  hair[static_cast<std::size_t>(ids.up)] -= 1e-13;
  hair[static_cast<std::size_t>(ids.middle)] = 1e-13;
  CHECK(epsilon_threshold(PathFlow(w, paths, hair)) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("variational gap is nonpositive between feasible flows") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  const PathFlow a(w, paths, {0.2, 0.5, 0.3});
  const PathFlow b(w, paths, {1.0, 0.0, 0.0});
  CHECK(variational_gap(a, b) <= 1e-12);
  CHECK(variational_gap(b, a) <= 1e-12);

  const Network two = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  const PathSet tp = enumerate_paths(two);
  const PathFlow c(two, tp, {1.0, 0.0});
  CHECK_THROWS_AS(variational_gap(a, c), InvalidFlow);
}

TEST_CASE("deterministic network JSON round-trips") {
  const Network w = make_wheatstone_chain(2, 0.125);
  const json j = network_to_json(w);
  const Network back = network_from_json(j);
  REQUIRE(back.edge_count() == w.edge_count());
  REQUIRE(back.trip_count() == w.trip_count());
  for (int e = 0; e < w.edge_count(); ++e) {
    CHECK(back.edge(e).id == w.edge(e).id);
    CHECK(back.edge(e).cost.coefficients() == w.edge(e).cost.coefficients());
  }
  for (int t = 0; t < w.trip_count(); ++t)
    CHECK(back.trip(t).demand == w.trip(t).demand);

  json bad = j;
  bad.erase("edges");
  CHECK_THROWS_AS(network_from_json(bad), ParseError);
}

TEST_CASE("stochastic network JSON round-trips and inherits base costs") {
  const StochasticNetwork n1 = make_n1();
  const json j = stochastic_to_json(n1);
  const StochasticNetwork back = stochastic_from_json(j);
  REQUIRE(back.state_count() == n1.state_count());
  CHECK(back.prior() == n1.prior());
  for (int s = 0; s < n1.state_count(); ++s)
    for (int e = 0; e < n1.base().edge_count(); ++e)
      CHECK(back.states()[static_cast<std::size_t>(s)].costs[static_cast<std::size_t>(e)].coefficients() ==
            n1.states()[static_cast<std::size_t>(s)].costs[static_cast<std::size_t>(e)].coefficients());

  // a state that lists no overrides uses the base network's cost on every edge
  json partial = j;
  partial["states"][0].erase("edge_costs");
  const StochasticNetwork inh = stochastic_from_json(partial);
  for (int e = 0; e < inh.base().edge_count(); ++e)
    CHECK(inh.states()[0].costs[static_cast<std::size_t>(e)].coefficients() ==
          inh.base().edge(e).cost.coefficients());

  json bad = j;
  bad["states"][0]["prior"] = 0.7;
  bad["states"][1]["prior"] = 0.7;
  CHECK_THROWS_AS(stochastic_from_json(bad), ParseError);
}
