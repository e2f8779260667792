#pragma once

#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "network.hpp"

namespace brue {

// Distances from every vertex to `destination` under fixed nonnegative edge
// costs, plus the successor edge realizing each distance.  Ties prefer the
// smaller edge index so paths are deterministic.
struct DistanceField {
  std::vector<double> dist;       // +inf where destination is unreachable
  std::vector<int> successor;     // edge to follow toward destination, -1 at destination
};

inline DistanceField distances_to(const Network& net, const std::vector<double>& costs,
                                  int destination) {
  const double inf = std::numeric_limits<double>::infinity();
  DistanceField f;
  f.dist.assign(static_cast<std::size_t>(net.vertex_count()), inf);
  f.successor.assign(static_cast<std::size_t>(net.vertex_count()), -1);
  f.dist[static_cast<std::size_t>(destination)] = 0.0;

  using Item = std::pair<double, int>;  // (distance, vertex)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, destination);
  std::vector<char> done(static_cast<std::size_t>(net.vertex_count()), 0);

  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(v)]) continue;
    done[static_cast<std::size_t>(v)] = 1;
    for (int e : net.in_edges(v)) {
      const int u = net.edge(e).tail;
      if (done[static_cast<std::size_t>(u)]) continue;
      const double nd = d + costs[static_cast<std::size_t>(e)];
      double& cur = f.dist[static_cast<std::size_t>(u)];
      int& suc = f.successor[static_cast<std::size_t>(u)];
      if (nd < cur || (nd == cur && suc >= 0 && e < suc)) {
        cur = nd;
        suc = e;
        heap.emplace(nd, u);
      }
    }
  }
  return f;
}

// Cheapest simple path as an edge sequence, following the successor tree.
inline std::vector<int> shortest_path_edges(const Network& net, const DistanceField& field,
                                            int origin, int destination) {
  if (!(field.dist[static_cast<std::size_t>(origin)] <
        std::numeric_limits<double>::infinity()))
    throw NoPath("destination unreachable under current costs");
  std::vector<int> edges;
  int v = origin;
  while (v != destination) {
    const int e = field.successor[static_cast<std::size_t>(v)];
    if (e < 0 || static_cast<int>(edges.size()) > net.edge_count())
      throw Error("successor walk failed");  // cannot happen on a valid field
    edges.push_back(e);
    v = net.edge(e).head;
  }
  return edges;
}

}  // namespace brue
