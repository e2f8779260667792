#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "network.hpp"
#include "shortest_path.hpp"

namespace brue {

namespace detail {

// splitmix64; deterministic, seedable, implementation-independent.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2b594f8cd9dULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace detail

struct UESolveOptions {
  double tol = 1e-10;        // relative duality gap target
  int max_iters = 100000;
  std::uint64_t seed = 0;    // perturbs only the initial assignment
  const PathSet* paths = nullptr;  // decompose onto these paths when given
};

struct UESolution {
  std::shared_ptr<const PathSet> owned_paths;  // set when no path set was supplied
  PathFlow flow;
  double psi0 = 0.0;          // social cost at equilibrium
  double phi0 = 0.0;          // Beckmann potential at equilibrium
  double relative_gap = 0.0;  // duality gap / potential at termination
  int iterations = 0;
  std::vector<double> edge_flows;
};

// Thrown when the iteration budget runs out; carries the best iterate found.
struct NotConverged : Error {
  NotConverged(std::string what, UESolution sol)
      : Error(std::move(what)), best(std::move(sol)) {}
  UESolution best;
};

namespace detail {

// One all-or-nothing assignment: a path per trip plus its edge-flow image.
struct AonVertex {
  std::vector<std::vector<int>> trip_paths;
  std::vector<double> edge_flow;
};

inline AonVertex aon_assign(const Network& net, const std::vector<double>& costs) {
  AonVertex v;
  v.trip_paths.resize(static_cast<std::size_t>(net.trip_count()));
  v.edge_flow.assign(static_cast<std::size_t>(net.edge_count()), 0.0);
  std::map<int, DistanceField> fields;  // per destination
  for (int t = 0; t < net.trip_count(); ++t) {
    const Trip& trip = net.trip(t);
    auto it = fields.find(trip.destination);
    if (it == fields.end())
      it = fields.emplace(trip.destination, distances_to(net, costs, trip.destination)).first;
    auto edges = shortest_path_edges(net, it->second, trip.origin, trip.destination);
    for (int e : edges) v.edge_flow[static_cast<std::size_t>(e)] += trip.demand;
    v.trip_paths[static_cast<std::size_t>(t)] = std::move(edges);
  }
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// User equilibrium by away-step Frank-Wolfe on the Beckmann potential.  The
// active all-or-nothing vertices are kept with their convex weights, which
// both yields linear convergence on these instances and hands us a path-flow
// decomposition for free.  Termination uses the Frank-Wolfe duality gap
// sum_e c_e(f_e)(f_e - y_e) relative to the potential.
inline UESolution solve_ue(const Network& net, const UESolveOptions& options = {}) {
  const int E = net.edge_count();
  std::vector<detail::AonVertex> vertices;
  std::vector<double> weights;
  std::map<std::vector<std::vector<int>>, int> vertex_index;

  // Initial vertex: assignment under empty-network costs, optionally jittered
  // by the seed so different seeds can start from different ties.
  {
    std::vector<double> c0(static_cast<std::size_t>(E));
    std::uint64_t rng = options.seed;
    for (int e = 0; e < E; ++e) {
      c0[static_cast<std::size_t>(e)] = net.edge(e).cost(0.0);
      if (options.seed != 0)
        c0[static_cast<std::size_t>(e)] *= 1.0 + 1e-3 * detail::uniform01(rng);
    }
    auto v = detail::aon_assign(net, c0);
    vertex_index.emplace(v.trip_paths, 0);
    vertices.push_back(std::move(v));
    weights.push_back(1.0);
  }

  auto rebuild_x = [&]() {
    std::vector<double> x(static_cast<std::size_t>(E), 0.0);
    for (std::size_t v = 0; v < vertices.size(); ++v)
      for (int e = 0; e < E; ++e)
        x[static_cast<std::size_t>(e)] += weights[v] * vertices[v].edge_flow[static_cast<std::size_t>(e)];
    return x;
  };

  std::vector<double> x = rebuild_x();
  double rel_gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;

  for (; iter < options.max_iters; ++iter) {
    const auto costs = edge_costs(net, x);
    auto fw = detail::aon_assign(net, costs);
    const double gap = detail::dot(costs, x) - detail::dot(costs, fw.edge_flow);
    const double phi = potential(net, x);
    rel_gap = gap / std::max(phi, 1e-12);
    if (rel_gap <= options.tol) {
      converged = true;
      break;
    }

    // Away vertex: the active assignment with the highest current cost.
    int away = 0;
    double away_cost = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      const double c = detail::dot(costs, vertices[v].edge_flow);
      if (c > away_cost) {
        away_cost = c;
        away = static_cast<int>(v);
      }
    }
    const double gap_away = away_cost - detail::dot(costs, x);

    std::vector<double> dir(static_cast<std::size_t>(E));
    double gamma_max = 1.0;
    bool away_step = gap_away > gap && weights.size() > 1;
    if (away_step) {
      const double wa = weights[static_cast<std::size_t>(away)];
      gamma_max = wa / (1.0 - wa);
      for (int e = 0; e < E; ++e)
        dir[static_cast<std::size_t>(e)] =
            x[static_cast<std::size_t>(e)] - vertices[static_cast<std::size_t>(away)].edge_flow[static_cast<std::size_t>(e)];
    } else {
      for (int e = 0; e < E; ++e)
        dir[static_cast<std::size_t>(e)] = fw.edge_flow[static_cast<std::size_t>(e)] - x[static_cast<std::size_t>(e)];
    }

    // Exact line search: the directional derivative of the potential is
    // monotone, so bisect it on [0, gamma_max].
    auto dphi = [&](double gamma) {
      double s = 0.0;
      for (int e = 0; e < E; ++e)
        s += net.edge(e).cost(x[static_cast<std::size_t>(e)] + gamma * dir[static_cast<std::size_t>(e)]) *
             dir[static_cast<std::size_t>(e)];
      return s;
    };
    double gamma = gamma_max;
    if (dphi(gamma_max) > 0.0) {
      double lo = 0.0, hi = gamma_max;
      for (int it2 = 0; it2 < 100; ++it2) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) <= 0.0 ? lo : hi) = mid;
      }
      gamma = 0.5 * (lo + hi);
    }

    if (away_step) {
      for (double& w : weights) w *= 1.0 + gamma;
      weights[static_cast<std::size_t>(away)] -= gamma;
    } else {
      for (double& w : weights) w *= 1.0 - gamma;
      auto it = vertex_index.find(fw.trip_paths);
      if (it == vertex_index.end()) {
        vertex_index.emplace(fw.trip_paths, static_cast<int>(vertices.size()));
        vertices.push_back(std::move(fw));
        weights.push_back(gamma);
      } else {
        weights[static_cast<std::size_t>(it->second)] += gamma;
      }
    }

    // Drop negligible vertices and renormalize the simplex weights.
    for (std::size_t v = vertices.size(); v-- > 0;) {
      if (weights[v] <= 1e-16) {
        vertices.erase(vertices.begin() + static_cast<std::ptrdiff_t>(v));
        weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(v));
      }
    }
    vertex_index.clear();
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      weights[v] /= wsum;
      vertex_index.emplace(vertices[v].trip_paths, static_cast<int>(v));
    }
    x = rebuild_x();
  }

  // Decompose the vertex weights into path flows.
  std::shared_ptr<const PathSet> owned;
  const PathSet* ps = options.paths;
  if (ps == nullptr) {
    auto built = std::make_shared<PathSet>();
    for (int t = 0; t < net.trip_count(); ++t) {
      std::vector<std::vector<int>> seqs;
      for (const auto& v : vertices) seqs.push_back(v.trip_paths[static_cast<std::size_t>(t)]);
      std::sort(seqs.begin(), seqs.end());
      seqs.erase(std::unique(seqs.begin(), seqs.end()), seqs.end());
      const int begin = built->count();
      for (auto& s : seqs) built->paths.push_back({t, std::move(s)});
      built->trip_range.emplace_back(begin, built->count());
    }
    owned = built;
    ps = owned.get();
  }
  std::vector<double> values(static_cast<std::size_t>(ps->count()), 0.0);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    for (int t = 0; t < net.trip_count(); ++t) {
      const int p = ps->find(t, vertices[v].trip_paths[static_cast<std::size_t>(t)]);
      if (p < 0) throw Error("equilibrium path missing from the supplied path set");
      values[static_cast<std::size_t>(p)] += weights[v] * net.trip(t).demand;
    }
  }

  UESolution sol{std::move(owned),
                 PathFlow(net, *ps, std::move(values)),
                 social_cost(net, x),
                 potential(net, x),
                 rel_gap,
                 iter,
                 x};
  if (!converged)
    throw NotConverged("user equilibrium gap " + std::to_string(rel_gap) + " after " +
                           std::to_string(iter) + " iterations",
                       std::move(sol));
  return sol;
}

// System optimum social cost via the marginal-cost transformation: solving
// user equilibrium under c_e(x) + x c_e'(x) minimizes the true social cost.
inline double min_social_cost(const Network& net, const UESolveOptions& options = {}) {
  std::vector<CostPolynomial> marginals;
  marginals.reserve(static_cast<std::size_t>(net.edge_count()));
  for (const Edge& e : net.edges()) marginals.push_back(e.cost.marginal());
  const Network mnet = net.with_costs(std::move(marginals));
  UESolveOptions opts = options;
  opts.paths = nullptr;  // path identity is irrelevant here
  try {
    const UESolution sol = solve_ue(mnet, opts);
    return social_cost(net, sol.edge_flows);
  } catch (const NotConverged& nc) {
    // The carried iterate references the local marginal-cost network; rebind
    // it to the caller's network before letting the exception escape.
    UESolution best = nc.best;
    best.psi0 = social_cost(net, best.edge_flows);
    best.phi0 = potential(net, best.edge_flows);
    best.flow = PathFlow(net, best.owned_paths ? *best.owned_paths : best.flow.paths(),
                         best.flow.values());
    throw NotConverged(nc.what(), std::move(best));
  }
}

}  // namespace brue
