#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <brue/brue.hpp>

using namespace brue;

TEST_CASE("beliefs and schemes validate their probabilities") {
  CHECK_THROWS_AS(Belief({0.7, 0.7}), Error);
  CHECK_THROWS_AS(Belief({-0.1, 1.1}), Error);
  CHECK(Belief::binary(0.25).probs()[0] == Catch::Approx(0.75));

  const std::vector<double> prior{0.5, 0.5};
  // posteriors must average back to the prior
  CHECK_THROWS_AS(SignalScheme::from_posteriors({Belief::binary(0.2), Belief::binary(0.4)},
                                                {0.5, 0.5}, prior),
                  Error);
  const SignalScheme ok = SignalScheme::from_posteriors(
      {Belief::binary(0.25), Belief::binary(0.75)}, {0.5, 0.5}, prior);
  CHECK_FALSE(ok.is_no_revelation());
  CHECK_FALSE(ok.is_full_revelation());
  CHECK(SignalScheme::no_revelation(prior).is_no_revelation());
  CHECK(SignalScheme::full_revelation(prior).is_full_revelation());
}

TEST_CASE("blackwell order compares posterior spreads at a fixed mean") {
  const std::vector<double> prior{0.5, 0.5};
  const SignalScheme none = SignalScheme::no_revelation(prior);
  const SignalScheme full = SignalScheme::full_revelation(prior);
  const SignalScheme mid = SignalScheme::from_posteriors(
      {Belief::binary(0.25), Belief::binary(0.75)}, {0.5, 0.5}, prior);

  CHECK(blackwell_compare(full, none) == BlackwellOrder::more_informative);
  CHECK(blackwell_compare(none, full) == BlackwellOrder::less_informative);
  CHECK(blackwell_compare(full, mid) == BlackwellOrder::more_informative);
  CHECK(blackwell_compare(mid, mid) == BlackwellOrder::equal);

  const SignalScheme shifted = SignalScheme::from_posteriors(
      {Belief::binary(0.1), Belief::binary(0.9)}, {0.75, 0.25}, {0.7, 0.3});
  CHECK(blackwell_compare(shifted, mid) == BlackwellOrder::incomparable);
}

TEST_CASE("worst-case value at a belief matches the deterministic solver") {
  const StochasticNetwork n2 = make_n2();
  const Network at_half = posterior_network(n2, Belief::binary(0.5));
  const PathSet paths = enumerate_paths(at_half);
  const double direct = worst_brue(at_half, paths, 0.3).psi_eps;
  CHECK(psi_eps_at_belief(n2, Belief::binary(0.5), 0.3) == Catch::Approx(direct).margin(1e-12));
  CHECK(direct == Catch::Approx(1.045).margin(2e-3));
}

TEST_CASE("designed schemes fit the known regimes") {
  const StochasticNetwork n1 = make_n1();
  DesignOptions opt;

  CHECK(design_signal(n1, 0.02, opt).scheme.is_no_revelation());
  CHECK(design_signal(n1, 0.095, opt).scheme.is_full_revelation());

  const SignalDesign partial = design_signal(n1, 0.05, opt);
  REQUIRE(partial.scheme.posteriors().size() == 2);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  for (std::size_t m = 0; m < 2; ++m) {
    const double q = partial.scheme.posteriors()[m].probs()[1];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    mean += partial.scheme.weights()[m] * q;
  }
  CHECK(lo == Catch::Approx(0.3021780382).margin(1e-4));
  CHECK(hi == Catch::Approx(1.0).margin(1e-9));
  CHECK(mean == Catch::Approx(0.5).margin(1e-12));  // Bayes plausibility
  CHECK_FALSE(partial.approximate);
}

TEST_CASE("designed value beats random plausible two-posterior schemes") {
  const StochasticNetwork n1 = make_n1();
  DesignOptions opt;
  const double eps = 0.05;
  const SignalDesign best = design_signal(n1, eps, opt);

  std::uint64_t rng = 7;
  for (int i = 0; i < 100; ++i) {
    const double a = 0.5 * detail::uniform01(rng);
    const double b = 0.5 + 0.5 * detail::uniform01(rng);
    const double w = (b - 0.5) / std::max(b - a, 1e-12);  // weight on the low posterior
    const double value = w * psi_eps_at_belief(n1, Belief::binary(a), eps) +
                         (1.0 - w) * psi_eps_at_belief(n1, Belief::binary(b), eps);
    CHECK(best.expected_cost <= value + 1e-6);
  }
}

TEST_CASE("full revelation wins exactly in the middle band") {
  const StochasticNetwork n2 = make_n2();
  DesignOptions opt;

  const SignalDesign full = design_signal(n2, 1.0, opt);
  CHECK(full.scheme.is_full_revelation());
  CHECK(full.expected_cost == Catch::Approx(1.25).margin(2e-3));

  const SignalDesign low = design_signal(n2, 0.3, opt);
  CHECK(low.scheme.is_no_revelation());
  CHECK(low.expected_cost == Catch::Approx(1.045).margin(2e-3));

  const SignalDesign high = design_signal(n2, 1.6, opt);
  CHECK(high.scheme.is_no_revelation());
  CHECK(high.expected_cost == Catch::Approx(1.5).margin(2e-3));

  // the designer never does worse than releasing nothing
  for (double eps : {0.0, 0.2, 0.5, 0.9, 1.4, 2.1})
    CHECK(design_signal(n2, eps, opt).expected_cost <=
          psi_eps_at_belief(n2, n2.prior_belief(), eps) + 1e-9);
}

TEST_CASE("schemes designed for lenient drivers can hurt strict ones") {
  const StochasticNetwork n1 = make_n1();
  DesignOptions opt;
  const SignalDesign aggressive = design_signal(n1, 0.09, opt);
  REQUIRE(aggressive.scheme.is_full_revelation());

  const double realized = expected_realized_cost(n1, aggressive.scheme, 0.0);
  const double norev = psi_eps_at_belief(n1, n1.prior_belief(), 0.0);
  CHECK(realized == Catch::Approx(13.0 / 7.0).margin(2e-3));
  CHECK(realized > norev + 1e-4);
}

TEST_CASE("excess report averages per-message equilibrium gaps") {
  const StochasticNetwork n2 = make_n2();
  const SignalScheme full = SignalScheme::full_revelation(n2.prior());

  std::vector<Network> nets;
  for (const Belief& q : full.posteriors()) nets.push_back(posterior_network(n2, q));
  std::vector<PathSet> paths;
  for (const Network& net : nets) paths.push_back(enumerate_paths(net));

  // equilibrium flows per message: no excess, no threshold
  std::vector<PathFlow> eq_flows;
  for (std::size_t m = 0; m < nets.size(); ++m) {
    UESolveOptions o;
    o.paths = &paths[m];
    eq_flows.push_back(solve_ue(nets[m], o).flow);
  }
  const SchemeExcessReport at_eq = scheme_excess_report(full, eq_flows);
  CHECK(at_eq.mean_excess == Catch::Approx(0.0).margin(1e-6));
  CHECK(at_eq.mean_threshold <= 1e-6);
  REQUIRE(at_eq.per_message.size() == 2);

  // push everyone onto the risky road in both states
  std::vector<PathFlow> risky_flows;
  for (std::size_t m = 0; m < nets.size(); ++m)
    risky_flows.emplace_back(nets[m], paths[m], std::vector<double>{1.0, 0.0});
  const SchemeExcessReport at_risky = scheme_excess_report(full, risky_flows);
  double expect_excess = 0.0;
  for (std::size_t m = 0; m < nets.size(); ++m)
    expect_excess += full.weights()[m] * at_risky.per_message[m].psi;
  CHECK(at_risky.mean_excess == Catch::Approx(expect_excess));
  CHECK(at_risky.mean_excess > 0.0);
  CHECK(at_risky.ratio == Catch::Approx(at_risky.mean_excess / at_risky.mean_threshold));
}

TEST_CASE("more than two states needs the sampling fallback") {
  const Network base = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  std::vector<StateCosts> states;
  for (double c : {1.0, 2.0, 3.0}) {
    StateCosts s;
    s.name = "c" + std::to_string(static_cast<int>(c));
    s.costs = {CostPolynomial({c}), CostPolynomial({2.0})};
    states.push_back(std::move(s));
  }
  const StochasticNetwork tri(base, states, {0.25, 0.5, 0.25});

  DesignOptions opt;
  CHECK_THROWS_AS(design_signal(tri, 0.1, opt), UnsupportedStateSpace);
  opt.best_effort = true;
  const SignalDesign d = design_signal(tri, 0.1, opt);
  CHECK(d.approximate);
  CHECK(d.expected_cost <= psi_eps_at_belief(tri, tri.prior_belief(), 0.1) + 1e-9);
}
