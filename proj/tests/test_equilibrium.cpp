#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <brue/brue.hpp>

using namespace brue;

namespace {

// feasible per-trip Dirichlet draw for variational-inequality spot checks
std::vector<double> random_flow(const Network& net, const PathSet& paths, std::uint64_t& rng) {
  std::vector<double> v(static_cast<std::size_t>(paths.count()), 0.0);
  for (int t = 0; t < net.trip_count(); ++t) {
    auto [b, e] = paths.range(t);
    double sum = 0.0;
    for (int p = b; p < e; ++p) {
      v[static_cast<std::size_t>(p)] = -std::log(std::max(detail::uniform01(rng), 1e-12));
      sum += v[static_cast<std::size_t>(p)];
    }
    for (int p = b; p < e; ++p) v[static_cast<std::size_t>(p)] *= net.trip(t).demand / sum;
  }
  return v;
}

}  // namespace

TEST_CASE("wheatstone equilibrium reaches the reference values") {
  const Network w = make_wheatstone();
  const UESolution sol = solve_ue(w);
  CHECK(sol.psi0 == Catch::Approx(1.0).margin(1e-6));
  CHECK(sol.phi0 == Catch::Approx(0.75).margin(1e-6));
  CHECK(sol.relative_gap <= 1e-9);
  CHECK(sol.iterations <= 100000);

  const auto costs = edge_costs(w, sol.edge_flows);
  const PathSet& paths = sol.flow.paths();
  for (int p = 0; p < paths.count(); ++p)
    CHECK(path_cost_from_edge_costs(paths, p, costs) == Catch::Approx(1.0).margin(1e-6));
  CHECK(epsilon_threshold(sol.flow) <= 1e-6);
}

TEST_CASE("equilibrium edge flows are seed-independent") {
  const Network w = make_wheatstone();
  UESolveOptions a, b;
  a.seed = 1;
  b.seed = 2;
  const UESolution sa = solve_ue(w, a);
  const UESolution sb = solve_ue(w, b);
  for (int e = 0; e < w.edge_count(); ++e)
    CHECK(sa.edge_flows[static_cast<std::size_t>(e)] ==
          Catch::Approx(sb.edge_flows[static_cast<std::size_t>(e)]).margin(1e-6));
}

TEST_CASE("equilibrium satisfies the variational inequality against random flows") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  UESolveOptions opts;
  opts.paths = &paths;
  const UESolution sol = solve_ue(w, opts);
  const auto costs = edge_costs(w, sol.edge_flows);

  std::uint64_t rng = 42;
  double worst = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_flow(w, paths, rng);
    double s = 0.0;
    for (int p = 0; p < paths.count(); ++p)
      s += (sol.flow[p] - g[static_cast<std::size_t>(p)]) *
           path_cost_from_edge_costs(paths, p, costs);
    worst = std::max(worst, s);
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("parallel road equilibria load the cheap road") {
  const Network two = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  CHECK(solve_ue(two).psi0 == Catch::Approx(1.0).margin(1e-9));

  const Network pigou = make_two_road(CostPolynomial({0.0, 1.0}), CostPolynomial({1.0}));
  const UESolution sol = solve_ue(pigou);
  CHECK(sol.psi0 == Catch::Approx(1.0).margin(1e-8));
  CHECK(min_social_cost(pigou) == Catch::Approx(0.75).margin(1e-6));
}

TEST_CASE("chain equilibrium has vanishing threshold") {
  const Network chain = make_wheatstone_chain(2, 1e-3);
  const PathSet paths = enumerate_paths(chain);
  UESolveOptions opts;
  opts.paths = &paths;
  const UESolution sol = solve_ue(chain, opts);
  CHECK(sol.relative_gap <= 1e-9);
  CHECK(epsilon_threshold(sol.flow) <= 1e-6);
  CHECK(min_social_cost(chain) <= sol.psi0 + 1e-9);
}

TEST_CASE("system optimum of the wheatstone ignores the shortcut") {
  CHECK(min_social_cost(make_wheatstone()) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("iteration starvation reports the best iterate") {
  const Network w = make_wheatstone();
  UESolveOptions opts;
  opts.tol = 1e-300;
  opts.max_iters = 2;
  try {
    solve_ue(w, opts);
    // exact-arithmetic convergence in two steps would be a surprise, not a bug
  } catch (const NotConverged& nc) {
    CHECK(std::isfinite(nc.best.psi0));
    CHECK(nc.best.flow.paths().count() == 3);
    CHECK(nc.best.relative_gap >= 0.0);
  }
}

TEST_CASE("requested decomposition paths are honored") {
  const Network w = make_wheatstone();
  const PathSet paths = enumerate_paths(w);
  UESolveOptions opts;
  opts.paths = &paths;
  const UESolution sol = solve_ue(w, opts);
  CHECK(&sol.flow.paths() == &paths);
  CHECK_FALSE(sol.owned_paths);
  double sum = 0.0;
  for (int p = 0; p < paths.count(); ++p) sum += sol.flow[p];
  CHECK(sum == Catch::Approx(1.0));
}
