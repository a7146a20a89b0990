#pragma once

// Test-only reference implementations. These deliberately avoid the library's
// search code: distances come from exhaustive simple-path enumeration so they
// can serve as an independent oracle.

#include <functional>
#include <vector>

#include "nwsf/graph.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/util.hpp"

namespace test_support {

using nwsf::BoughtSet;
using nwsf::MaybeRat;
using nwsf::NodeWeightedGraph;
using nwsf::Rat;
using nwsf::Rng;

inline Rat path_cost(const NodeWeightedGraph& g, const BoughtSet& zeroed,
                     const std::vector<int>& path) {
  Rat c(0);
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    int v = path[i];
    if (!zeroed.contains(v)) c += g.weight(v);
  }
  return c;
}

// Minimum interior weight over all simple u-v paths, by full enumeration.
inline MaybeRat brute_dist(const NodeWeightedGraph& g, const BoughtSet& zeroed, int u, int v) {
  if (u == v) return Rat(0);
  MaybeRat best;
  std::vector<char> used(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<int> path{u};
  used[static_cast<std::size_t>(u)] = 1;

  std::function<void()> dfs = [&] {
    int cur = path.back();
    if (cur == v) {
      Rat c = path_cost(g, zeroed, path);
      if (!best || c < *best) best = c;
      return;
    }
    for (int nb : g.neighbors(cur)) {
      if (used[static_cast<std::size_t>(nb)]) continue;
      used[static_cast<std::size_t>(nb)] = 1;
      path.push_back(nb);
      dfs();
      path.pop_back();
      used[static_cast<std::size_t>(nb)] = 0;
    }
  };
  dfs();
  return best;
}

inline NodeWeightedGraph random_graph(Rng& rng, int n, long wmax) {
  std::vector<Rat> w;
  for (int v = 0; v < n; ++v) w.push_back(nwsf::rat(rng.next_in(0, wmax)));
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.next_unit() < 0.45) edges.emplace_back(a, b);
  return NodeWeightedGraph(n, std::move(w), edges);
}

}  // namespace test_support
