#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <brue/brue.hpp>

using namespace brue;

TEST_CASE("two-road worst case jumps at the cost gap") {
  const Network two = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  const PathSet paths = enumerate_paths(two);

  const WorstBrueResult at_gap = worst_brue(two, paths, 1.0);
  CHECK(at_gap.psi_eps == Catch::Approx(2.0).margin(1e-9));
  CHECK(at_gap.witness[0] == Catch::Approx(0.0).margin(1e-9));
  CHECK(at_gap.witness[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(at_gap.certified);

  CHECK(worst_brue(two, paths, 0.0).psi_eps == Catch::Approx(1.0).margin(1e-9));
  CHECK(worst_brue(two, paths, 0.99).psi_eps == Catch::Approx(1.0).margin(1e-9));
  CHECK_THROWS_AS(worst_brue(two, paths, -0.5), Error);
}

TEST_CASE("wheatstone worst case follows the quadratic ramp") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  for (double eps : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    const WorstBrueResult res = worst_brue(w, paths, eps);
    CHECK(res.psi_eps == Catch::Approx(1.0 + eps + 2.0 * eps * eps).margin(1e-6));
    CHECK(epsilon_threshold(res.witness) <= eps + 1e-8);
  }
  CHECK(worst_brue(w, paths, 0.0).psi_eps == Catch::Approx(1.0).margin(1e-8));
  const WorstBrueResult half = worst_brue(w, paths, 0.5);
  CHECK(half.psi_eps == Catch::Approx(2.0).margin(1e-8));
  CHECK(half.certified);
}

TEST_CASE("support solver agrees with the exhaustive lattice") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  for (double eps : {0.1, 0.3, 0.7}) {
    const WorstBrueResult fast = worst_brue(w, paths, eps);
    const WorstBrueResult slow = worst_brue_grid(w, paths, eps, 1e-3);
    CHECK(fast.psi_eps == Catch::Approx(slow.psi_eps).margin(1e-3));
    CHECK(fast.psi_eps >= slow.psi_eps - 1e-9);  // the lattice can only undershoot
  }
}

TEST_CASE("worst-case curve is monotone and saturates") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  CHECK(epsilon_bar_upper_bound(w, paths) == Catch::Approx(2.0));

  const auto curve = psi_eps_curve(w, paths, {0.0, 0.1, 0.3, 0.5, 1.0, 2.0, 2.3});
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].second >= curve[i - 1].second - 1e-9);
  CHECK(curve.front().second == Catch::Approx(1.0).margin(1e-8));
  CHECK(curve.back().second == Catch::Approx(2.0).margin(1e-8));
  CHECK(curve[curve.size() - 2].second == Catch::Approx(curve.back().second).margin(1e-9));
}

TEST_CASE("average excess time normalizes by demand") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  const auto ids = wheatstone_paths(paths);
  const double psi0 = solve_ue(w).psi0;

  std::vector<double> all_mid(3, 0.0);
  all_mid[static_cast<std::size_t>(ids.middle)] = 1.0;
  const ExcessTimeReport rep = average_excess_time(PathFlow(w, paths, all_mid), psi0);
  CHECK(rep.psi == Catch::Approx(1.0).margin(1e-6));
  CHECK(rep.eps == Catch::Approx(0.5).margin(1e-9));
  CHECK(rep.ratio == Catch::Approx(2.0).margin(1e-5));
  CHECK(rep.demand_l1 == Catch::Approx(1.0));

  std::vector<double> even(3, 0.0);
  even[static_cast<std::size_t>(ids.up)] = 0.5;
  even[static_cast<std::size_t>(ids.down)] = 0.5;
  const ExcessTimeReport zero = average_excess_time(PathFlow(w, paths, even), psi0);
  CHECK(zero.ratio == 0.0);  // both excess and threshold vanish
}

TEST_CASE("inefficiency estimator recovers the chain scaling") {
  {
    const Network chain = make_wheatstone_chain(3, 0.01);
    const PathSet paths = enumerate_paths(chain);
    const double m = estimate_inefficiency_factor(chain, paths, {0.001, 0.0025, 0.005, 0.01});
    CHECK(m == Catch::Approx(3.0).epsilon(0.10));
  }
  for (int n = 1; n <= 4; ++n) {
    const Network chain = make_wheatstone_chain(n, 1e-3);
    const PathSet paths = enumerate_paths(chain);
    const double m =
        estimate_inefficiency_factor(chain, paths, {1e-4, 2.5e-4, 5e-4, 7.5e-4, 1e-3});
    CHECK(m >= 0.95 * n);
  }
}

TEST_CASE("support enumeration refuses oversized path sets") {
  const Network chain = make_wheatstone_chain(4, 1e-3);
  const PathSet paths = enumerate_paths(chain);
  REQUIRE(paths.count() > 20);
  CHECK_THROWS_AS(worst_brue(chain, paths, 0.1), PathExplosion);
}

TEST_CASE("proof-construction witness drives the chain ratio") {
  const Network chain = make_wheatstone_chain(3, 1e-3);
  const PathSet paths = enumerate_paths(chain);
  const ChainWitness wit = make_chain_witness(chain, paths, 0.5);
  const PathFlow f(chain, paths, wit.equilibrium);
  const PathFlow g(chain, paths, wit.perturbed);
  const ExcessTimeReport rep = average_excess_time(g, social_cost(f));
  CHECK(rep.ratio == Catch::Approx(3.0).epsilon(0.05));
  CHECK_THROWS_AS(make_chain_witness(chain, paths, 0.9), Error);
}
