#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

// Undirected graph with nonnegative vertex weights. Immutable once built;
// all distance primitives below are pure functions of it.
class NodeWeightedGraph {
 public:
  NodeWeightedGraph(int n, std::vector<Rat> weights,
                    const std::vector<std::pair<int, int>>& edges)
      : n_(n), w_(std::move(weights)), adj_(static_cast<std::size_t>(n)) {
    if (n < 0) throw InputError("vertex count must be nonnegative");
    if (static_cast<int>(w_.size()) != n) throw InputError("weights size mismatch");
    for (const Rat& w : w_)
      if (w < 0) throw InputError("negative vertex weight");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
      if (u < 0 || u >= n || v < 0 || v >= n) throw InputError("edge references invalid vertex");
      if (u == v) continue;  // self-loops dropped
      auto key = std::minmax(u, v);
      if (!seen.insert(key).second) continue;  // duplicates collapsed
      adj_[static_cast<std::size_t>(u)].push_back(v);
      adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  int vertex_count() const { return n_; }
  const Rat& weight(int v) const { return w_.at(static_cast<std::size_t>(v)); }
  const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& nb : adj_) m += nb.size();
    return m / 2;
  }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
      for (int v : adj_[static_cast<std::size_t>(u)])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  void check_vertex(int v) const {
    if (v < 0 || v >= n_) throw InputError("invalid vertex id");
  }

  // {"n": int, "weights": [num...], "edges": [[u,v]...]}, ids 0-based.
  static NodeWeightedGraph from_json(const nlohmann::json& j) {
    int n = j.at("n").get<int>();
    std::vector<Rat> w;
    for (const auto& x : j.at("weights")) {
      if (x.is_number_integer())
        w.push_back(rat(x.get<long>()));
      else
        w.push_back(rat_from_double(x.get<double>()));
    }
    std::vector<std::pair<int, int>> es;
    for (const auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return NodeWeightedGraph(n, std::move(w), es);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    auto ws = nlohmann::json::array();
    for (const Rat& w : w_) ws.push_back(to_double(w));
    j["weights"] = ws;
    auto es = nlohmann::json::array();
    for (auto [u, v] : edges()) es.push_back({u, v});
    j["edges"] = es;
    return j;
  }

 private:
  int n_;
  std::vector<Rat> w_;
  std::vector<std::vector<int>> adj_;
};

// Grow-only set of selected vertices. There is deliberately no remove
// operation; the insertion log lets tests audit irrevocability.
class BoughtSet {
 public:
  explicit BoughtSet(int n) : in_(static_cast<std::size_t>(n), 0) {}

  bool contains(int v) const { return in_.at(static_cast<std::size_t>(v)) != 0; }

  bool add(int v) {
    if (in_.at(static_cast<std::size_t>(v))) return false;
    in_[static_cast<std::size_t>(v)] = 1;
    log_.push_back(v);
    return true;
  }

  int size() const { return static_cast<int>(log_.size()); }
  const std::vector<int>& insertion_log() const { return log_; }

  std::vector<int> members() const {
    std::vector<int> m = log_;
    std::sort(m.begin(), m.end());
    return m;
  }

 private:
  std::vector<char> in_;
  std::vector<int> log_;
};

struct DistResult {
  bool reachable = false;
  Rat cost;
  std::vector<int> path;  // endpoints included; empty when unreachable
  int hit = -1;           // reached target (dist_to_set only)
};

// Single-source node-weighted shortest paths from `source`. The label of v is
// the minimum total weight of the path interior, where vertices in `zeroed`
// (and both endpoints) contribute zero. Pops are ordered by (dist, id) and
// equal-distance parents are refined lexicographically, so results are
// deterministic.
class ShortestPaths {
 public:
  ShortestPaths(const NodeWeightedGraph& g, const BoughtSet* zeroed, int source,
                const std::vector<char>* extra_zeroed = nullptr)
      : g_(g), source_(source) {
    g.check_vertex(source);
    int n = g.vertex_count();
    dist_.assign(static_cast<std::size_t>(n), Rat());
    settled_.assign(static_cast<std::size_t>(n), 0);
    reached_.assign(static_cast<std::size_t>(n), 0);
    parent_.assign(static_cast<std::size_t>(n), -1);

    auto zero_weight = [&](int v) {
      return (zeroed && zeroed->contains(v)) || (extra_zeroed && (*extra_zeroed)[static_cast<std::size_t>(v)]);
    };

    using Key = std::pair<Rat, int>;
    auto cmp = [](const Key& a, const Key& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second > b.second;
    };
    std::priority_queue<Key, std::vector<Key>, decltype(cmp)> pq(cmp);
    dist_[static_cast<std::size_t>(source)] = Rat(0);
    reached_[static_cast<std::size_t>(source)] = 1;
    pq.emplace(Rat(0), source);

    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      auto su = static_cast<std::size_t>(u);
      if (settled_[su]) continue;
      settled_[su] = 1;
      // Interior charge applies when the path continues through u.
      Rat through = d;
      if (u != source_ && !zero_weight(u)) through += g.weight(u);
      for (int v : g.neighbors(u)) {
        auto sv = static_cast<std::size_t>(v);
        if (settled_[sv]) continue;
        if (!reached_[sv] || through < dist_[sv]) {
          reached_[sv] = 1;
          dist_[sv] = through;
          parent_[sv] = u;
          pq.emplace(through, v);
        } else if (through == dist_[sv] && lex_better(u, parent_[sv])) {
          parent_[sv] = u;
        }
      }
    }
  }

  bool reachable(int v) const { return reached_.at(static_cast<std::size_t>(v)) != 0; }
  const Rat& dist(int v) const { return dist_.at(static_cast<std::size_t>(v)); }

  std::vector<int> path_to(int v) const {
    std::vector<int> p;
    if (!reachable(v)) return p;
    for (int x = v; x != -1; x = parent_[static_cast<std::size_t>(x)]) p.push_back(x);
    std::reverse(p.begin(), p.end());
    return p;
  }

 private:
  bool lex_better(int cand_parent, int cur_parent) const {
    std::vector<int> a = path_to(cand_parent);
    std::vector<int> b = path_to(cur_parent);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  const NodeWeightedGraph& g_;
  int source_;
  std::vector<Rat> dist_;
  std::vector<char> settled_, reached_;
  std::vector<int> parent_;
};

// Cheapest u-v path weight counting only interior vertices outside `zeroed`.
inline DistResult dist_excluding(const NodeWeightedGraph& g, const BoughtSet& zeroed, int u, int v) {
  g.check_vertex(u);
  g.check_vertex(v);
  DistResult r;
  if (u == v) {
    r.reachable = true;
    r.cost = Rat(0);
    r.path = {u};
    r.hit = u;
    return r;
  }
  ShortestPaths sp(g, &zeroed, u);
  if (!sp.reachable(v)) return r;
  r.reachable = true;
  r.cost = sp.dist(v);
  r.path = sp.path_to(v);
  r.hit = v;
  return r;
}

// Minimum of dist_excluding over a nonempty target set; ties go to the
// smallest vertex id.
inline DistResult dist_to_set(const NodeWeightedGraph& g, const BoughtSet& zeroed, int u,
                              const std::vector<int>& targets) {
  if (targets.empty()) throw InputError("dist_to_set: empty target set");
  g.check_vertex(u);
  for (int t : targets) g.check_vertex(t);
  for (int t : targets)
    if (t == u) return dist_excluding(g, zeroed, u, u);
  ShortestPaths sp(g, &zeroed, u);
  DistResult best;
  for (int t : targets) {
    if (!sp.reachable(t)) continue;
    if (!best.reachable || sp.dist(t) < best.cost ||
        (sp.dist(t) == best.cost && t < best.hit)) {
      best.reachable = true;
      best.cost = sp.dist(t);
      best.hit = t;
    }
  }
  if (best.reachable) best.path = sp.path_to(best.hit);
  return best;
}

struct BoundaryResult {
  std::vector<int> boundary;  // Bd(u, r)
  std::vector<int> ball;      // open ball B(u, r)
};

// The boundary is always measured in the original metric, never contracted.
inline BoundaryResult boundary(const NodeWeightedGraph& g, int u, const Rat& r) {
  if (!(r > 0)) throw InputError("boundary: radius must be positive");
  g.check_vertex(u);
  ShortestPaths sp(g, nullptr, u);
  BoundaryResult out;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (!sp.reachable(v)) continue;
    const Rat& d = sp.dist(v);
    if (d < r) {
      out.ball.push_back(v);
      if (v != u && r <= d + g.weight(v)) out.boundary.push_back(v);
    }
  }
  return out;
}

}  // namespace nwsf
