#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "network.hpp"
#include "stochastic.hpp"

namespace brue {

// Two parallel roads between one origin-destination pair.
inline Network make_two_road(CostPolynomial r0, CostPolynomial r1, double demand = 1.0) {
  std::vector<Edge> edges;
  edges.push_back({"r0", 0, 1, std::move(r0)});
  edges.push_back({"r1", 0, 1, std::move(r1)});
  return Network({"o", "d"}, std::move(edges), {{0, 1, demand}});
}

// The Wheatstone network: two congestible outer links (latency x), two
// constant half-latency links and a free middle link, unit demand.  Path
// enumeration order is upper (x, 1/2), middle (x, 0, x), lower (1/2, x).
inline Network make_wheatstone() {
  std::vector<Edge> edges;
  edges.push_back({"a", 0, 1, CostPolynomial{0.0, 1.0}});  // o  -> t, latency x
  edges.push_back({"b", 1, 3, CostPolynomial{0.5}});       // t  -> d
  edges.push_back({"z", 1, 2, CostPolynomial{}});          // t  -> b, free
  edges.push_back({"c", 0, 2, CostPolynomial{0.5}});       // o  -> b
  edges.push_back({"d", 2, 3, CostPolynomial{0.0, 1.0}});  // b  -> d, latency x
  return Network({"o", "t", "b", "d"}, std::move(edges), {{0, 3, 1.0}});
}

struct WheatstonePaths {
  int up = -1;
  int middle = -1;
  int down = -1;
};

// Path indices of a single Wheatstone copy's trip in enumeration order.
inline WheatstonePaths wheatstone_paths(const PathSet& paths, int trip = 0) {
  auto [b, e] = paths.range(trip);
  if (e - b != 3) throw Error("trip does not have the three Wheatstone paths");
  return {b, b + 1, b + 2};
}

// n Wheatstone copies in series.  Junctions j0..jn; copy i spans j(i-1) -> ji
// with its own overlay vertices.  Trips: one per copy with demand d_prime,
// then the through trip j0 -> jn with demand 1 - d_prime.
inline Network make_wheatstone_chain(int n, double d_prime) {
  if (n < 1) throw InvalidNetwork("chain needs at least one copy");
  if (!(d_prime > 0.0 && d_prime < 1.0))
    throw InvalidNetwork("per-copy demand must lie strictly between 0 and 1");

  std::vector<std::string> vertices;
  vertices.push_back("j0");
  auto junction = [](int i) { return 3 * i; };
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    const std::string k = std::to_string(i);
    const int top = 3 * i - 2, bottom = 3 * i - 1;
    vertices.push_back("t" + k);
    vertices.push_back("b" + k);
    vertices.push_back("j" + k);
    edges.push_back({"a" + k, junction(i - 1), top, CostPolynomial{0.0, 1.0}});
    edges.push_back({"b" + k, top, junction(i), CostPolynomial{0.5}});
    edges.push_back({"z" + k, top, bottom, CostPolynomial{}});
    edges.push_back({"c" + k, junction(i - 1), bottom, CostPolynomial{0.5}});
    edges.push_back({"d" + k, bottom, junction(i), CostPolynomial{0.0, 1.0}});
  }
  std::vector<Trip> trips;
  for (int i = 1; i <= n; ++i) trips.push_back({junction(i - 1), junction(i), d_prime});
  trips.push_back({junction(0), junction(n), 1.0 - d_prime});
  return Network(std::move(vertices), std::move(edges), std::move(trips));
}

struct ChainWitness {
  std::vector<double> equilibrium;  // canonical equilibrium decomposition
  std::vector<double> perturbed;    // eta-perturbation loading each middle link
};

// The constructive chain flows: at equilibrium every copy splits evenly and no
// middle link is used; the perturbation moves a 2*eta share of each per-copy
// demand onto the middle link, producing threshold eta * d_prime.
inline ChainWitness make_chain_witness(const Network& net, const PathSet& paths, double eta) {
  if (!(eta >= 0.0 && eta <= 0.5)) throw Error("eta must lie in [0, 1/2]");
  const int n = net.trip_count() - 1;
  ChainWitness w;
  w.equilibrium.assign(static_cast<std::size_t>(paths.count()), 0.0);
  w.perturbed.assign(static_cast<std::size_t>(paths.count()), 0.0);

  for (int t = 0; t < n; ++t) {
    auto [b, e] = paths.range(t);
    if (e - b != 3) throw Error("network is not a Wheatstone chain");
    const double d = net.trip(t).demand;
    w.equilibrium[static_cast<std::size_t>(b)] = 0.5 * d;      // upper
    w.equilibrium[static_cast<std::size_t>(b + 2)] = 0.5 * d;  // lower
    w.perturbed[static_cast<std::size_t>(b)] = (0.5 - eta) * d;
    w.perturbed[static_cast<std::size_t>(b + 1)] = 2.0 * eta * d;  // middle
    w.perturbed[static_cast<std::size_t>(b + 2)] = (0.5 - eta) * d;
  }

  // Through trip: spread evenly over the 2^n upper/lower combinations; paths
  // are ordered base-3 (upper=0, middle=1, lower=2) per copy.
  auto [b, e] = paths.range(n);
  if (e - b != static_cast<int>(std::llround(std::pow(3.0, n))))
    throw Error("network is not a Wheatstone chain");
  const double share = net.trip(n).demand / std::ldexp(1.0, n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    int offset = 0;
    for (int i = 0; i < n; ++i) {
      offset *= 3;
      if (mask & (1 << (n - 1 - i))) offset += 2;
    }
    w.equilibrium[static_cast<std::size_t>(b + offset)] += share;
    w.perturbed[static_cast<std::size_t>(b + offset)] += share;
  }
  return w;
}

// Stochastic two-road instance: a risky road whose latency jumps from
// x/5 + 8/5 to the constant 2 in the bad state, against a safe road x/2 + 3/2.
inline StochasticNetwork make_n1() {
  Network base = make_two_road(CostPolynomial{1.6, 0.2}, CostPolynomial{1.5, 0.5});
  std::vector<StateCosts> states(2);
  states[0] = {"low", {CostPolynomial{1.6, 0.2}, CostPolynomial{1.5, 0.5}}};
  states[1] = {"high", {CostPolynomial{2.0}, CostPolynomial{1.5, 0.5}}};
  return StochasticNetwork(std::move(base), std::move(states), {0.5, 0.5});
}

// Stochastic two-road instance with linear congestion on the risky road:
// latency x + w for state w in {0, 1}, against a safe road x + 1/2.
inline StochasticNetwork make_n2(double prior1 = 0.5) {
  Network base = make_two_road(CostPolynomial{0.0, 1.0}, CostPolynomial{0.5, 1.0});
  std::vector<StateCosts> states(2);
  states[0] = {"w0", {CostPolynomial{0.0, 1.0}, CostPolynomial{0.5, 1.0}}};
  states[1] = {"w1", {CostPolynomial{1.0, 1.0}, CostPolynomial{0.5, 1.0}}};
  return StochasticNetwork(std::move(base), std::move(states), {1.0 - prior1, prior1});
}

}  // namespace brue
