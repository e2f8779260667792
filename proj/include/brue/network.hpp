#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace brue {

struct Edge {
  std::string id;
  int tail = -1;
  int head = -1;
  CostPolynomial cost;
};

struct Trip {
  int origin = -1;
  int destination = -1;
  double demand = 0.0;
};

// Directed network with polynomial link latencies and a finite trip table.
// Vertices and edges are indexed densely; string ids are kept for I/O.
class Network {
 public:
  Network(std::vector<std::string> vertex_ids, std::vector<Edge> edges, std::vector<Trip> trips)
      : vertex_ids_(std::move(vertex_ids)), edges_(std::move(edges)), trips_(std::move(trips)) {
    const int n = static_cast<int>(vertex_ids_.size());
    if (n == 0) throw InvalidNetwork("network needs at least one vertex");
    for (int v = 0; v < n; ++v) {
      if (!vertex_index_.emplace(vertex_ids_[static_cast<std::size_t>(v)], v).second)
        throw InvalidNetwork("duplicate vertex id '" + vertex_ids_[static_cast<std::size_t>(v)] + "'");
    }
    out_.assign(static_cast<std::size_t>(n), {});
    in_.assign(static_cast<std::size_t>(n), {});
    std::unordered_map<std::string, int> edge_ids;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      const Edge& ed = edges_[static_cast<std::size_t>(e)];
      if (ed.tail < 0 || ed.tail >= n || ed.head < 0 || ed.head >= n)
        throw InvalidNetwork("edge '" + ed.id + "' references a missing vertex");
      if (ed.tail == ed.head)
        throw InvalidNetwork("edge '" + ed.id + "' is a self-loop");
      if (!edge_ids.emplace(ed.id, e).second)
        throw InvalidNetwork("duplicate edge id '" + ed.id + "'");
      out_[static_cast<std::size_t>(ed.tail)].push_back(e);
      in_[static_cast<std::size_t>(ed.head)].push_back(e);
    }
    if (trips_.empty()) throw InvalidNetwork("trip table is empty");
    for (const Trip& t : trips_) {
      if (t.origin < 0 || t.origin >= n || t.destination < 0 || t.destination >= n)
        throw InvalidNetwork("trip references a missing vertex");
      if (t.origin == t.destination) throw InvalidNetwork("trip origin equals destination");
      if (!(t.demand > 0.0) || !std::isfinite(t.demand))
        throw InvalidNetwork("trip demand must be positive and finite");
      if (!reachable(t.origin, t.destination))
        throw NoPath("no path from '" + vertex_ids_[static_cast<std::size_t>(t.origin)] + "' to '" +
                     vertex_ids_[static_cast<std::size_t>(t.destination)] + "'");
    }
  }

  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int trip_count() const { return static_cast<int>(trips_.size()); }

  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::vector<Trip>& trips() const { return trips_; }
  const Trip& trip(int t) const { return trips_[static_cast<std::size_t>(t)]; }

  const std::vector<int>& out_edges(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& in_edges(int v) const { return in_[static_cast<std::size_t>(v)]; }

  int vertex_index(const std::string& id) const {
    auto it = vertex_index_.find(id);
    if (it == vertex_index_.end()) throw InvalidNetwork("unknown vertex id '" + id + "'");
    return it->second;
  }

  double total_demand() const {
    double s = 0.0;
    for (const Trip& t : trips_) s += t.demand;
    return s;
  }

  // Same topology, different latencies (e.g. marginal costs, posterior mixes).
  Network with_costs(std::vector<CostPolynomial> costs) const {
    if (static_cast<int>(costs.size()) != edge_count())
      throw InvalidNetwork("cost vector size does not match edge count");
    std::vector<Edge> es = edges_;
    for (std::size_t e = 0; e < es.size(); ++e) es[e].cost = std::move(costs[e]);
    return Network(vertex_ids_, std::move(es), trips_);
  }

 private:
  bool reachable(int from, int to) const {
    std::vector<char> seen(vertex_ids_.size(), 0);
    std::queue<int> q;
    q.push(from);
    seen[static_cast<std::size_t>(from)] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      if (v == to) return true;
      for (int e : out_[static_cast<std::size_t>(v)]) {
        int w = edges_[static_cast<std::size_t>(e)].head;
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          q.push(w);
        }
      }
    }
    return false;
  }

  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::vector<Trip> trips_;
  std::unordered_map<std::string, int> vertex_index_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// All simple origin-destination paths, grouped by trip.  Paths are stored as
// edge index sequences; within a trip they are sorted lexicographically, which
// is also the order the DFS below produces them in.
struct PathSet {
  struct Path {
    int trip = -1;
    std::vector<int> edges;
  };

  std::vector<Path> paths;
  std::vector<std::pair<int, int>> trip_range;  // [begin, end) into paths, per trip

  int count() const { return static_cast<int>(paths.size()); }

  const Path& path(int p) const { return paths[static_cast<std::size_t>(p)]; }

  // Paths of one trip as an index range.
  std::pair<int, int> range(int trip) const { return trip_range[static_cast<std::size_t>(trip)]; }

  int find(int trip, const std::vector<int>& edges) const {
    auto [b, e] = trip_range[static_cast<std::size_t>(trip)];
    for (int p = b; p < e; ++p)
      if (paths[static_cast<std::size_t>(p)].edges == edges) return p;
    return -1;
  }
};

inline constexpr std::size_t kDefaultPathCap = 100000;

// Depth-first enumeration of all simple paths per trip; throws PathExplosion
// once more than `cap` paths exist in total.
inline PathSet enumerate_paths(const Network& net, std::size_t cap = kDefaultPathCap) {
  if (cap == 0) throw PathExplosion("path cap must be positive");
  PathSet ps;
  std::vector<char> visited(static_cast<std::size_t>(net.vertex_count()), 0);
  std::vector<int> stack;

  for (int t = 0; t < net.trip_count(); ++t) {
    const Trip& trip = net.trip(t);
    int begin = ps.count();

    auto dfs = [&](auto&& self, int v) -> void {
      if (v == trip.destination) {
        if (ps.paths.size() >= cap)
          throw PathExplosion("more than " + std::to_string(cap) + " simple paths");
        ps.paths.push_back({t, stack});
        return;
      }
      visited[static_cast<std::size_t>(v)] = 1;
      for (int e : net.out_edges(v)) {
        int w = net.edge(e).head;
        if (visited[static_cast<std::size_t>(w)]) continue;
        stack.push_back(e);
        self(self, w);
        stack.pop_back();
      }
      visited[static_cast<std::size_t>(v)] = 0;
    };
    dfs(dfs, trip.origin);

    if (ps.count() == begin)
      throw NoPath("trip " + std::to_string(t) + " has no simple path");
    ps.trip_range.emplace_back(begin, ps.count());
  }
  return ps;
}

// Path flow vector tied to a network and its enumerated paths.  Construction
// validates nonnegativity and per-trip demand feasibility (relative tolerance),
// then rescales each trip exactly onto its demand.
class PathFlow {
 public:
  PathFlow(const Network& net, const PathSet& paths, std::vector<double> values,
           double feas_rtol = 1e-9)
      : net_(&net), paths_(&paths), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != paths_->count())
      throw InvalidFlow("flow vector size does not match path count");
    for (int t = 0; t < net_->trip_count(); ++t) {
      auto [b, e] = paths_->range(t);
      const double d = net_->trip(t).demand;
      double sum = 0.0;
      for (int p = b; p < e; ++p) {
        double& v = values_[static_cast<std::size_t>(p)];
        if (!std::isfinite(v) || v < -feas_rtol * std::max(1.0, d))
          throw InvalidFlow("negative path flow");
        v = std::max(v, 0.0);
        sum += v;
      }
      if (std::fabs(sum - d) > feas_rtol * std::max(1.0, d))
        throw InvalidFlow("trip " + std::to_string(t) + " flow sums to " + std::to_string(sum) +
                          ", demand is " + std::to_string(d));
      const double scale = d / sum;
      for (int p = b; p < e; ++p) values_[static_cast<std::size_t>(p)] *= scale;
    }
  }

  const Network& network() const { return *net_; }
  const PathSet& paths() const { return *paths_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int p) const { return values_[static_cast<std::size_t>(p)]; }

  std::vector<double> edge_flows() const {
    std::vector<double> f(static_cast<std::size_t>(net_->edge_count()), 0.0);
    for (int p = 0; p < paths_->count(); ++p) {
      double v = values_[static_cast<std::size_t>(p)];
      if (v == 0.0) continue;
      for (int e : paths_->path(p).edges) f[static_cast<std::size_t>(e)] += v;
    }
    return f;
  }

 private:
  const Network* net_;
  const PathSet* paths_;
  std::vector<double> values_;
};

inline std::vector<double> edge_costs(const Network& net, const std::vector<double>& edge_flows) {
  std::vector<double> c(edge_flows.size());
  for (std::size_t e = 0; e < edge_flows.size(); ++e)
    c[e] = net.edge(static_cast<int>(e)).cost(edge_flows[e]);
  return c;
}

inline double path_cost_from_edge_costs(const PathSet& paths, int p,
                                        const std::vector<double>& costs) {
  double s = 0.0;
  for (int e : paths.path(p).edges) s += costs[static_cast<std::size_t>(e)];
  return s;
}

inline double path_cost(const PathFlow& g, int p) {
  const auto costs = edge_costs(g.network(), g.edge_flows());
  return path_cost_from_edge_costs(g.paths(), p, costs);
}

// Social cost in edge form: sum_e f_e c_e(f_e).
inline double social_cost(const Network& net, const std::vector<double>& edge_flows) {
  double s = 0.0;
  for (std::size_t e = 0; e < edge_flows.size(); ++e)
    s += edge_flows[e] * net.edge(static_cast<int>(e)).cost(edge_flows[e]);
  return s;
}

inline double social_cost(const PathFlow& g) { return social_cost(g.network(), g.edge_flows()); }

// Social cost in path form: sum_P g_P c_P(g).  Equal to the edge form; kept as
// an independent evaluation for consistency checks.
inline double social_cost_path_form(const PathFlow& g) {
  const auto costs = edge_costs(g.network(), g.edge_flows());
  double s = 0.0;
  for (int p = 0; p < g.paths().count(); ++p)
    s += g[p] * path_cost_from_edge_costs(g.paths(), p, costs);
  return s;
}

// Beckmann potential: sum_e integral_0^{f_e} c_e.
inline double potential(const Network& net, const std::vector<double>& edge_flows) {
  double s = 0.0;
  for (std::size_t e = 0; e < edge_flows.size(); ++e)
    s += net.edge(static_cast<int>(e)).cost.integral(edge_flows[e]);
  return s;
}

inline double potential(const PathFlow& g) { return potential(g.network(), g.edge_flows()); }

// A path counts as used when its flow exceeds this (absolute) threshold.
inline double default_support_tol(const Network& net) { return 1e-9 * net.total_demand(); }

// Indifference threshold of a flow: the smallest eps such that every used path
// is within eps of its trip's minimum cost over all paths.
inline double epsilon_threshold(const PathFlow& g,
                                std::optional<double> support_tol = std::nullopt) {
  const double tol = support_tol.value_or(default_support_tol(g.network()));
  const auto costs = edge_costs(g.network(), g.edge_flows());
  double worst = 0.0;
  for (int t = 0; t < g.network().trip_count(); ++t) {
    auto [b, e] = g.paths().range(t);
    double cmin = std::numeric_limits<double>::infinity();
    double cmax_used = -std::numeric_limits<double>::infinity();
    for (int p = b; p < e; ++p) {
      const double c = path_cost_from_edge_costs(g.paths(), p, costs);
      cmin = std::min(cmin, c);
      if (g[p] > tol) cmax_used = std::max(cmax_used, c);
    }
    if (cmax_used > -std::numeric_limits<double>::infinity())
      worst = std::max(worst, cmax_used - cmin);
  }
  return std::max(worst, 0.0);
}

inline bool is_brue(const PathFlow& g, double eps,
                    std::optional<double> support_tol = std::nullopt) {
  return epsilon_threshold(g, support_tol) <= eps;
}

// Slack in the variational inequality for eps-indifferent flows:
//   sum_P (f_P - g_P) c_P(f)  -  (1/2) eps(f) ||f - g||_1,
// which is nonpositive (up to rounding) for every feasible g.  A value of 0
// means g realizes the worst case; large negative values mean f is far from
// the boundary of its indifference band.
inline double variational_gap(const PathFlow& f, const PathFlow& g,
                              std::optional<double> support_tol = std::nullopt) {
  if (&f.paths() != &g.paths() || f.paths().count() != g.paths().count())
    throw InvalidFlow("variational gap needs flows over the same path set");
  const auto costs = edge_costs(f.network(), f.edge_flows());
  double s = 0.0, dist = 0.0;
  for (int p = 0; p < f.paths().count(); ++p) {
    s += (f[p] - g[p]) * path_cost_from_edge_costs(f.paths(), p, costs);
    dist += std::fabs(f[p] - g[p]);
  }
  return s - 0.5 * epsilon_threshold(f, support_tol) * dist;
}

inline double l1_distance(const PathFlow& f, const PathFlow& g) {
  double s = 0.0;
  for (int p = 0; p < f.paths().count(); ++p) s += std::fabs(f[p] - g[p]);
  return s;
}

}  // namespace brue
