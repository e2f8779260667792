#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "equilibrium.hpp"
#include "persuasion.hpp"
#include "topologies.hpp"
#include "worst_case.hpp"

// Reference-result checks.  Every group compares solver output against pinned
// values (closed forms, independent grid scans, or structural facts) with
// explicit tolerances; the acceptance harness and the CLI `reproduce` command
// both render these rows.

namespace brue {

struct CheckRow {
  enum class Kind { near, at_most, at_least };

  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  Kind kind = Kind::near;
  bool pass = false;

  static CheckRow near(std::string name, double observed, double expected, double tol) {
    CheckRow r{std::move(name), observed, expected, tol, Kind::near, false};
    r.pass = std::fabs(observed - expected) <= tol;
    return r;
  }
  static CheckRow at_most(std::string name, double observed, double bound, double tol) {
    CheckRow r{std::move(name), observed, bound, tol, Kind::at_most, false};
    r.pass = observed <= bound + tol;
    return r;
  }
  static CheckRow at_least(std::string name, double observed, double bound, double tol) {
    CheckRow r{std::move(name), observed, bound, tol, Kind::at_least, false};
    r.pass = observed >= bound - tol;
    return r;
  }
  static CheckRow boolean(std::string name, bool ok) {
    return near(std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0);
  }
};

struct CheckGroup {
  std::string name;
  std::vector<CheckRow> rows;

  bool passed() const {
    for (const CheckRow& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

namespace detail {

// Random feasible path flows: plain per-trip Dirichlet draws, mixed with
// draws contracted toward the equilibrium so small indifference thresholds
// get sampled too.
struct FlowSampler {
  const Network& net;
  const PathSet& paths;
  std::vector<double> ue_values;
  std::uint64_t state;

  FlowSampler(const Network& n, const PathSet& p, std::uint64_t seed)
      : net(n), paths(p), state(seed ^ 0x8badf00dULL) {
    UESolveOptions opts;
    opts.paths = &paths;
    ue_values = solve_ue(net, opts).flow.values();
  }

  std::vector<double> draw() {
    std::vector<double> v(static_cast<std::size_t>(paths.count()), 0.0);
    for (int t = 0; t < net.trip_count(); ++t) {
      auto [b, e] = paths.range(t);
      double sum = 0.0;
      for (int p = b; p < e; ++p) {
        const double u = std::max(uniform01(state), 1e-12);
        v[static_cast<std::size_t>(p)] = -std::log(u);
        sum += v[static_cast<std::size_t>(p)];
      }
      for (int p = b; p < e; ++p) v[static_cast<std::size_t>(p)] *= net.trip(t).demand / sum;
    }
    if (uniform01(state) < 0.5) return v;
    // log-uniform contraction: thresholds shrink roughly linearly with lambda
    const double lambda = std::pow(10.0, -4.0 * uniform01(state));
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = ue_values[i] + lambda * (v[i] - ue_values[i]);
    return v;
  }
};

inline double n1_value_formula(double mu, double eps) {
  return std::min(2.0, (12.0 + eps + 10.0 * eps * eps - 2.0 * mu + 4.0 * eps * mu) /
                           (7.0 - 2.0 * mu));
}

inline double n1_posterior_formula(double eps) {
  return 1.0 - 2.5 * eps - 2.5 * std::sqrt(eps + eps * eps);
}

inline double n2_value_formula(double mu, double eps) {
  const auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  const auto psi = [mu](double u) { return 2.0 * u * u + u * (mu - 2.5) + 1.5; };
  const double u_lo = clamp01((1.5 - mu - eps) / 2.0);
  const double u_hi = clamp01((1.5 - mu + eps) / 2.0);
  return std::max(psi(u_lo), psi(u_hi));
}

// 0 = no revelation, 1 = partial, 2 = full revelation.
inline int scheme_kind(const SignalScheme& s) {
  if (s.is_no_revelation()) return 0;
  if (s.is_full_revelation()) return 2;
  return 1;
}

inline double bisect_scheme_boundary(const StochasticNetwork& snet, double lo, double hi,
                                     const DesignOptions& opt) {
  int klo = scheme_kind(design_signal(snet, lo, opt).scheme);
  for (int it = 0; it < 30 && hi - lo > 1e-5; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (scheme_kind(design_signal(snet, mid, opt).scheme) == klo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Wheatstone reference values: equilibrium cost 1 with all path costs 1, the
// all-middle flow's threshold 1/2 and unit average excess time.
inline CheckGroup check_wheatstone_equilibrium() {
  CheckGroup g{"wheatstone equilibrium", {}};
  Network net = make_wheatstone();
  PathSet paths = enumerate_paths(net);
  UESolveOptions opts;
  opts.paths = &paths;
  const UESolution ue = solve_ue(net, opts);
  g.rows.push_back(CheckRow::near("equilibrium social cost", ue.psi0, 1.0, 1e-6));
  const auto costs = edge_costs(net, ue.edge_flows);
  static const char* names[3] = {"upper path cost at equilibrium",
                                 "middle path cost at equilibrium",
                                 "lower path cost at equilibrium"};
  for (int p = 0; p < 3; ++p)
    g.rows.push_back(
        CheckRow::near(names[p], path_cost_from_edge_costs(paths, p, costs), 1.0, 1e-6));

  auto [up, mid, down] = wheatstone_paths(paths);
  (void)up;
  (void)down;
  std::vector<double> all_middle(3, 0.0);
  all_middle[static_cast<std::size_t>(mid)] = 1.0;
  PathFlow middle(net, paths, all_middle);
  g.rows.push_back(
      CheckRow::near("threshold of the all-middle flow", epsilon_threshold(middle), 0.5, 1e-9));
  g.rows.push_back(CheckRow::near("average excess time of the all-middle flow",
                                  average_excess_time(middle, ue.psi0).psi, 1.0, 1e-6));
  return g;
}

// Extra Wheatstone facts: worst case at eps = 1/2, the system optimum, and a
// direct lattice scan agreeing with the marginal-cost solve.
inline CheckGroup check_wheatstone_extras() {
  CheckGroup g{"wheatstone worst case and optimum", {}};
  Network net = make_wheatstone();
  PathSet paths = enumerate_paths(net);

  const auto worst = worst_brue(net, paths, 0.5);
  g.rows.push_back(CheckRow::near("worst-case cost at eps=0.5", worst.psi_eps, 2.0, 1e-6));
  g.rows.push_back(CheckRow::boolean("worst case at eps=0.5 grid-certified", worst.certified));
  auto [up, mid, down] = wheatstone_paths(paths);
  g.rows.push_back(CheckRow::near("worst-case witness middle share", worst.witness[mid], 1.0, 1e-6));
  (void)up;
  (void)down;

  const double so = min_social_cost(net);
  g.rows.push_back(CheckRow::near("system-optimum social cost", so, 1.0, 1e-6));
  // independently: scan the flow simplex
  double lattice_min = std::numeric_limits<double>::infinity();
  const int m = 1000;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m - i; ++j) {
      std::vector<double> v{static_cast<double>(i) / m, static_cast<double>(j) / m,
                            static_cast<double>(m - i - j) / m};
      lattice_min = std::min(lattice_min, detail::social_cost_of_values(net, paths, v));
    }
  g.rows.push_back(CheckRow::near("system optimum vs simplex scan", so, lattice_min, 1e-6));
  return g;
}

// Two-road constant-cost worst cases against the exhaustive one-dimensional
// scan at step 1e-5: flat at 1 strictly below the cost gap, 2 from it on.
inline CheckGroup check_two_road_worst_case() {
  CheckGroup g{"two-road worst case vs grid oracle", {}};
  Network net = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
  PathSet paths = enumerate_paths(net);
  const double expected[5] = {1.0, 1.0, 1.0, 2.0, 2.0};
  const double eps_list[5] = {0.0, 0.5, 0.99, 1.0, 2.0};
  for (int i = 0; i < 5; ++i) {
    const auto solver = worst_brue(net, paths, eps_list[i]);
    const auto oracle = worst_brue_grid(net, paths, eps_list[i], 1e-5);
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst-case cost at eps=%.2f", eps_list[i]);
    g.rows.push_back(CheckRow::near(buf, solver.psi_eps, expected[i], 1e-6));
    std::snprintf(buf, sizeof buf, "solver vs oracle at eps=%.2f", eps_list[i]);
    g.rows.push_back(CheckRow::near(buf, solver.psi_eps, oracle.psi_eps, 1e-6));
  }
  return g;
}

// Chained Wheatstone copies: the perturbed flow from the construction proof
// realizes an excess-per-threshold ratio within 5% of the copy count.
inline CheckGroup check_chain_inefficiency() {
  CheckGroup g{"chain inefficiency scaling", {}};
  for (int n = 1; n <= 4; ++n) {
    Network net = make_wheatstone_chain(n, 1e-3);
    PathSet paths = enumerate_paths(net);
    ChainWitness wit = make_chain_witness(net, paths, 0.5);
    PathFlow f(net, paths, wit.equilibrium);
    PathFlow h(net, paths, wit.perturbed);
    const double psi0 = social_cost(f);
    const ExcessTimeReport rep = average_excess_time(h, psi0);
    char buf[64];
    std::snprintf(buf, sizeof buf, "excess/threshold ratio for %d copies", n);
    g.rows.push_back(CheckRow::near(buf, rep.ratio, static_cast<double>(n), 0.05 * n));
  }
  return g;
}

// Construction bookkeeping for the chain: closed-form cost gap and threshold
// of the proof witness, and the advertised vertex/edge counts.
inline CheckGroup check_chain_extras() {
  CheckGroup g{"chain witness closed forms", {}};
  const int n = 2;
  const double d_prime = 0.1, eta = 0.25;
  Network net = make_wheatstone_chain(n, d_prime);
  PathSet paths = enumerate_paths(net);
  ChainWitness wit = make_chain_witness(net, paths, eta);
  PathFlow f(net, paths, wit.equilibrium);
  PathFlow h(net, paths, wit.perturbed);
  const double delta = social_cost(h) - social_cost(f);
  const double ed = eta * d_prime;
  g.rows.push_back(
      CheckRow::near("cost gap of the witness", delta, n * ed + 2 * n * ed * ed, 1e-9));
  g.rows.push_back(CheckRow::near("threshold of the witness", epsilon_threshold(h), ed, 1e-9));
  g.rows.push_back(CheckRow::boolean("equilibrium flow has zero threshold",
                                     epsilon_threshold(f) <= 1e-9));

  Network four = make_wheatstone_chain(4, 1e-3);
  g.rows.push_back(CheckRow::near("vertex count of 4 copies", four.vertex_count(), 13.0, 0.0));
  g.rows.push_back(CheckRow::near("edge count of 4 copies", four.edge_count(), 20.0, 0.0));
  return g;
}

// Signal design regimes on the first stochastic two-road example: no
// revelation for small eps, the closed-form interior posterior in the middle
// band, full revelation beyond, regime boundaries by bisection, and Blackwell
// monotonicity of the emitted schemes.
inline CheckGroup check_n1_design_regimes() {
  CheckGroup g{"stochastic design regimes (n1)", {}};
  StochasticNetwork snet = make_n1();
  DesignOptions opt;

  g.rows.push_back(CheckRow::boolean(
      "no revelation at eps=0.02",
      design_signal(snet, 0.02, opt).scheme.is_no_revelation()));
  g.rows.push_back(CheckRow::boolean(
      "full revelation at eps=0.095",
      design_signal(snet, 0.095, opt).scheme.is_full_revelation()));

  for (double eps : {0.04, 0.05, 0.06, 0.08}) {
    const SignalDesign d = design_signal(snet, eps, opt);
    double lowest = 1.0;
    for (const Belief& b : d.scheme.posteriors()) lowest = std::min(lowest, b.probs()[1]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "interior posterior at eps=%.2f", eps);
    g.rows.push_back(CheckRow::near(buf, lowest, detail::n1_posterior_formula(eps), 1e-4));
  }

  const double b1 = detail::bisect_scheme_boundary(snet, 0.02, 0.04, opt);
  const double b2 = detail::bisect_scheme_boundary(snet, 0.08, 0.095, opt);
  g.rows.push_back(CheckRow::near("no-revelation regime boundary", b1, 1.0 / 35.0, 1e-3));
  g.rows.push_back(CheckRow::near("full-revelation regime boundary", b2, 4.0 / 45.0, 1e-3));

  bool nested = true;
  SignalScheme prev = design_signal(snet, 0.02, opt).scheme;
  for (double eps : {0.04, 0.05, 0.06, 0.08, 0.095}) {
    SignalScheme cur = design_signal(snet, eps, opt).scheme;
    const BlackwellOrder ord = blackwell_compare(cur, prev);
    if (ord != BlackwellOrder::more_informative && ord != BlackwellOrder::equal) nested = false;
    prev = std::move(cur);
  }
  g.rows.push_back(CheckRow::boolean("posterior hulls nested as eps grows", nested));
  return g;
}

// Closed-form regression for the n1 worst-case value over a (mu, eps) grid.
inline CheckGroup check_n1_value_formula() {
  CheckGroup g{"worst-case value formula (n1)", {}};
  StochasticNetwork snet = make_n1();
  for (int ei = 0; ei <= 5; ++ei) {
    const double eps = 0.02 * ei;
    double worst_diff = 0.0;
    for (int mi = 0; mi <= 10; ++mi) {
      const double mu = 0.1 * mi;
      const double solver = psi_eps_at_belief(snet, Belief::binary(mu), eps);
      worst_diff = std::max(worst_diff, std::fabs(solver - detail::n1_value_formula(mu, eps)));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max formula gap across mu at eps=%.2f", eps);
    g.rows.push_back(CheckRow::at_most(buf, worst_diff, 0.0, 2e-3));
  }
  return g;
}

// Boundary facts and the misdesign example on n1.
inline CheckGroup check_n1_extras() {
  CheckGroup g{"design boundary endpoints (n1)", {}};
  g.rows.push_back(CheckRow::near("interior posterior formula at the lower boundary",
                                  detail::n1_posterior_formula(1.0 / 35.0), 0.5, 1e-5));
  g.rows.push_back(CheckRow::near("interior posterior formula at the upper boundary",
                                  detail::n1_posterior_formula(4.0 / 45.0), 0.0, 1e-9));

  StochasticNetwork snet = make_n1();
  DesignOptions opt;
  const SignalDesign aggressive = design_signal(snet, 0.09, opt);
  const double realized = expected_realized_cost(snet, aggressive.scheme, 0.0);
  const double norev = psi_eps_at_belief(snet, snet.prior_belief(), 0.0);
  g.rows.push_back(CheckRow::near("strict scheme evaluated by exact-equilibrium drivers",
                                  realized, 13.0 / 7.0, 2e-3));
  g.rows.push_back(
      CheckRow::at_least("misdesign penalty over no revelation", realized - norev, 1e-4, 0.0));
  return g;
}

// Full-revelation window on the second stochastic example, plus the appendix
// value formula on a grid.
inline CheckGroup check_n2_revelation_window() {
  CheckGroup g{"full-revelation window (n2)", {}};
  StochasticNetwork snet = make_n2();
  DesignOptions opt;

  for (double eps : {0.8, 1.0, 1.2}) {
    const SignalDesign d = design_signal(snet, eps, opt);
    const double chord = 0.5 * (psi_eps_at_belief(snet, Belief::binary(0.0), eps) +
                                psi_eps_at_belief(snet, Belief::binary(1.0), eps));
    const double norev = psi_eps_at_belief(snet, Belief::binary(0.5), eps);
    char buf[64];
    std::snprintf(buf, sizeof buf, "full revelation emitted at eps=%.1f", eps);
    g.rows.push_back(CheckRow::boolean(buf, d.scheme.is_full_revelation()));
    std::snprintf(buf, sizeof buf, "design cost equals the chord at eps=%.1f", eps);
    g.rows.push_back(CheckRow::near(buf, d.expected_cost, chord, 1e-6));
    std::snprintf(buf, sizeof buf, "chord beats no revelation at eps=%.1f", eps);
    g.rows.push_back(CheckRow::at_least(buf, norev - chord, 1e-4, 0.0));
  }
  for (double eps : {0.3, 0.6, 1.3, 1.6}) {
    const SignalDesign d = design_signal(snet, eps, opt);
    const double chord = 0.5 * (psi_eps_at_belief(snet, Belief::binary(0.0), eps) +
                                psi_eps_at_belief(snet, Belief::binary(1.0), eps));
    char buf[72];
    std::snprintf(buf, sizeof buf, "full revelation strictly suboptimal at eps=%.1f", eps);
    g.rows.push_back(CheckRow::at_least(buf, chord - d.expected_cost, 1e-4, 0.0));
  }

  double worst_diff = 0.0;
  for (int mi = 0; mi <= 20; ++mi)
    for (int ei = 0; ei <= 20; ++ei) {
      const double mu = 0.05 * mi, eps = 0.1 * ei;
      const double solver = psi_eps_at_belief(snet, Belief::binary(mu), eps);
      worst_diff = std::max(worst_diff, std::fabs(solver - detail::n2_value_formula(mu, eps)));
    }
  g.rows.push_back(
      CheckRow::at_most("max value-formula gap on the 21x21 grid", worst_diff, 0.0, 2e-3));
  return g;
}

// Worst-case value pieces and the revelation threshold bound on n2.
inline CheckGroup check_n2_extras() {
  CheckGroup g{"worst-case value pieces (n2)", {}};
  StochasticNetwork snet = make_n2();
  const EpsilonInfinity ei = epsilon_infinity(snet);
  g.rows.push_back(CheckRow::near("saturation threshold", ei.value, 2.0, 1e-12));
  g.rows.push_back(CheckRow::boolean("saturation threshold exact (single trip)", ei.exact));
  g.rows.push_back(CheckRow::near("worst-case value at mu=0.5 eps=0.3",
                                  psi_eps_at_belief(snet, Belief::binary(0.5), 0.3), 1.045, 2e-3));
  g.rows.push_back(CheckRow::near("worst-case value at mu=0.7 eps=1.6",
                                  psi_eps_at_belief(snet, Belief::binary(0.7), 1.6), 1.7, 2e-3));

  DesignOptions opt;
  const SignalDesign d = design_signal(snet, 1.0, opt);
  g.rows.push_back(CheckRow::near("full-revelation weight on state 0",
                                  d.scheme.weights().at(0), 0.5, 1e-9));
  g.rows.push_back(CheckRow::near("design cost at eps=1.0", d.expected_cost, 1.25, 2e-3));
  return g;
}

// Beyond the saturation threshold information has no value: the designer
// returns no revelation and the belief-indexed worst case is convex.
inline CheckGroup check_large_eps_no_revelation() {
  CheckGroup g{"no revelation beyond saturation", {}};
  const StochasticNetwork nets[2] = {make_n1(), make_n2()};
  const char* tags[2] = {"n1", "n2"};
  DesignOptions opt;
  for (int i = 0; i < 2; ++i) {
    const double eps = epsilon_infinity(nets[i]).value + 0.1;
    const SignalDesign d = design_signal(nets[i], eps, opt);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s: no revelation emitted", tags[i]);
    g.rows.push_back(CheckRow::boolean(buf, d.scheme.is_no_revelation()));

    std::vector<double> values(101);
    for (int k = 0; k <= 100; ++k)
      values[static_cast<std::size_t>(k)] =
          psi_eps_at_belief(nets[i], Belief::binary(0.01 * k), eps);
    double min_second_diff = 0.0;
    for (int k = 1; k < 100; ++k)
      min_second_diff =
          std::min(min_second_diff, values[static_cast<std::size_t>(k + 1)] -
                                        2.0 * values[static_cast<std::size_t>(k)] +
                                        values[static_cast<std::size_t>(k - 1)]);
    std::snprintf(buf, sizeof buf, "%s: belief-indexed value convex", tags[i]);
    g.rows.push_back(CheckRow::at_least(buf, min_second_diff, 0.0, 1e-6));
  }
  return g;
}

// Sampled flow properties: the variational inequality, the potential bound,
// monotone-then-constant worst-case curves, bounded excess-per-threshold
// ratios, and the parallel-road excess bound.
inline CheckGroup check_flow_properties(std::uint64_t seed = 0) {
  CheckGroup g{"sampled flow properties", {}};
  const int samples = 10000;

  struct Subject {
    const char* tag;
    Network net;
    double ratio_bound;
    double ratio_tol;
  };
  std::vector<Subject> subjects;
  subjects.push_back({"wheatstone", make_wheatstone(), 2.0, 1e-3});
  subjects.push_back(
      {"two-road", make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0})), 1.0, 1e-6});
  subjects.push_back(
      {"pigou", make_two_road(CostPolynomial({0.0, 1.0}), CostPolynomial({1.0})), 0.0, 1e-9});

  for (const Subject& s : subjects) {
    PathSet paths = enumerate_paths(s.net);
    detail::FlowSampler sampler(s.net, paths, seed);
    UESolveOptions opts;
    opts.paths = &paths;
    const UESolution ue = solve_ue(s.net, opts);
    const double D = s.net.total_demand();

    double max_gap = -std::numeric_limits<double>::infinity();
    double max_potential_excess = -std::numeric_limits<double>::infinity();
    double max_ratio = -std::numeric_limits<double>::infinity();
    double max_parallel_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      PathFlow f(s.net, paths, sampler.draw());
      PathFlow h(s.net, paths, sampler.draw());
      max_gap = std::max(max_gap, variational_gap(f, h));

      const double eps_f = epsilon_threshold(f);
      max_potential_excess =
          std::max(max_potential_excess, potential(f) - (ue.phi0 + D * eps_f));

      const double psi_f = (social_cost(f) - ue.psi0) / D;
      if (eps_f >= 1e-4) max_ratio = std::max(max_ratio, psi_f / eps_f);
      max_parallel_excess = std::max(max_parallel_excess, psi_f - eps_f);
    }

    std::string tag(s.tag);
    g.rows.push_back(
        CheckRow::at_most(tag + ": variational inequality slack", max_gap, 0.0, 1e-7));
    g.rows.push_back(CheckRow::at_most(tag + ": potential above threshold bound",
                                       max_potential_excess, 0.0, 1e-7));
    g.rows.push_back(CheckRow::at_most(tag + ": excess/threshold ratio", max_ratio,
                                       s.ratio_bound, s.ratio_tol));
    if (s.net.trip_count() == 1 && paths.count() == 2)
      g.rows.push_back(CheckRow::at_most(tag + ": parallel-road excess at most threshold",
                                         max_parallel_excess, 0.0, 1e-6));
  }

  // Worst-case curves: nondecreasing everywhere, constant beyond saturation.
  {
    Network net = make_two_road(CostPolynomial({1.0}), CostPolynomial({2.0}));
    PathSet paths = enumerate_paths(net);
    bool valid = true;
    std::vector<std::pair<double, double>> curve;
    try {
      curve = psi_eps_curve(net, paths, {0.0, 0.25, 0.5, 0.75, 0.99, 1.0, 1.5, 2.0, 2.5});
    } catch (const Error&) {
      valid = false;
    }
    g.rows.push_back(CheckRow::boolean("two-road curve monotone then constant", valid));
    if (valid) {
      g.rows.push_back(CheckRow::near("two-road curve below the gap", curve[4].second, 1.0, 1e-6));
      g.rows.push_back(CheckRow::near("two-road curve at the gap", curve[5].second, 2.0, 1e-6));
    }
  }
  {
    Network net = make_wheatstone();
    PathSet paths = enumerate_paths(net);
    bool valid = true;
    std::vector<std::pair<double, double>> curve;
    try {
      curve = psi_eps_curve(net, paths, {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 2.2});
    } catch (const Error&) {
      valid = false;
    }
    g.rows.push_back(CheckRow::boolean("wheatstone curve monotone then constant", valid));
    if (valid) {
      g.rows.push_back(CheckRow::near("wheatstone curve at zero", curve[0].second, 1.0, 1e-6));
      g.rows.push_back(CheckRow::near("wheatstone curve at one half", curve[3].second, 2.0, 1e-6));
    }
  }
  return g;
}

// The acceptance gate: one group per criterion, in order.
inline std::vector<CheckGroup> acceptance_checks(std::uint64_t seed = 0) {
  return {check_wheatstone_equilibrium(),
          check_two_road_worst_case(),
          check_chain_inefficiency(),
          check_n1_design_regimes(),
          check_n1_value_formula(),
          check_n2_revelation_window(),
          check_large_eps_no_revelation(),
          check_flow_properties(seed)};
}

}  // namespace brue
