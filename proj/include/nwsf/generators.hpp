#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "json.hpp"
#include "nwsf/covering_lp.hpp"
#include "nwsf/graph.hpp"
#include "nwsf/oracles.hpp"
#include "nwsf/sc_rounding.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

// Random set-cover instance with every element covered by at least one set.
inline SetCoverInstance gen_random_sc(Rng& rng, int n_elems, int n_sets, long cost_lo,
                                      long cost_hi) {
  if (n_elems > 0 && n_sets <= 0) throw InputError("gen_random_sc: impossible coverage");
  if (cost_lo < 0 || cost_hi < cost_lo) throw InputError("gen_random_sc: bad cost range");
  SetCoverInstance inst;
  inst.set_costs.resize(static_cast<std::size_t>(n_sets));
  inst.sets.resize(static_cast<std::size_t>(n_sets));
  for (int s = 0; s < n_sets; ++s) inst.set_costs[static_cast<std::size_t>(s)] = rat(rng.next_in(cost_lo, cost_hi));
  std::vector<char> covered(static_cast<std::size_t>(n_elems), 0);
  for (int s = 0; s < n_sets; ++s)
    for (int e = 0; e < n_elems; ++e)
      if (rng.next_unit() < 0.35) {
        inst.sets[static_cast<std::size_t>(s)].push_back(e);
        covered[static_cast<std::size_t>(e)] = 1;
      }
  for (int e = 0; e < n_elems; ++e)
    if (!covered[static_cast<std::size_t>(e)]) {
      int s = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_sets)));
      inst.sets[static_cast<std::size_t>(s)].push_back(e);
      std::sort(inst.sets[static_cast<std::size_t>(s)].begin(), inst.sets[static_cast<std::size_t>(s)].end());
    }
  inst.validate();
  return inst;
}

inline void validate_sc_coverage(const SetCoverInstance& inst, int n_elems) {
  std::vector<char> covered(static_cast<std::size_t>(n_elems), 0);
  for (const auto& s : inst.sets)
    for (int e : s) covered.at(static_cast<std::size_t>(e)) = 1;
  for (int e = 0; e < n_elems; ++e)
    if (!covered[static_cast<std::size_t>(e)]) throw InfeasibleError("uncovered element in instance");
}

// Set cover as a Steiner forest instance: element vertices (weight 0), one
// vertex per set carrying the set cost, and a root adjacent to every set
// vertex. Demands connect each element to the root.
inline PcNwsfInstance gen_sc_reduction(const SetCoverInstance& sc) {
  sc.validate();
  int k = sc.n_elements();
  int n = sc.n_sets();
  std::vector<Rat> weights(static_cast<std::size_t>(k), Rat(0));
  for (int s = 0; s < n; ++s) weights.push_back(sc.set_costs[static_cast<std::size_t>(s)]);
  weights.push_back(Rat(0));  // root
  int root = k + n;
  std::vector<std::pair<int, int>> edges;
  for (int s = 0; s < n; ++s) {
    for (int e : sc.sets[static_cast<std::size_t>(s)]) edges.emplace_back(e, k + s);
    edges.emplace_back(k + s, root);
  }
  PcNwsfInstance out{NodeWeightedGraph(k + n + 1, std::move(weights), edges), {}};
  for (int e = 0; e < k; ++e) out.pairs.push_back({e, root, std::nullopt});
  return out;
}

// The lower-bound family for the single-threshold baseline: terminals
// s_1..s_k (weight 0), hub vertices v_i adjacent to s_1..s_i with weights
// increasing by a tiny perturbation, pairs (s_1, s_i) arriving in order.
inline PcNwsfInstance gen_counterexample(int k) {
  if (k < 2) throw InputError("gen_counterexample: k must be >= 2");
  std::vector<Rat> weights(static_cast<std::size_t>(k), Rat(0));
  for (int i = 1; i <= k; ++i) weights.push_back(Rat(1) + rat(i, 1000000));
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= i; ++j) edges.emplace_back(k + i - 1, j - 1);
  PcNwsfInstance out{NodeWeightedGraph(2 * k, std::move(weights), edges), {}};
  for (int i = 2; i <= k; ++i) out.pairs.push_back({0, i - 1, std::nullopt});
  return out;
}

// Precomputed per-arrival view of the counterexample family. When pair
// (s_1, s_i) arrives, its cut consists of the hubs v_i..v_k and the
// fractional mass 1/(k-i+1) is spread equally over them: each candidate
// value equals 1/(k-i+1), the cut sums to exactly one, and every coordinate
// grows monotonically as the cut shrinks. Values stay below 1/(2 log k)
// until the last arrivals, which is what defeats a single shared threshold.
struct CounterexampleFeed {
  int k = 0;
  std::vector<double> hub_cost;                        // hub_cost[i-1] = w(v_i)
  std::vector<std::vector<RoundingCandidate>> cands;   // per arrival i=2..k
  std::vector<std::vector<FracUpdate>> updates;        // values changed per arrival
  double opt = 0.0;                                    // w(v_k); v_k lies in every solution
};

inline CounterexampleFeed make_counterexample_feed(int k) {
  if (k < 2) throw InputError("counterexample feed: k must be >= 2");
  CounterexampleFeed feed;
  feed.k = k;
  feed.hub_cost.resize(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i)
    feed.hub_cost[static_cast<std::size_t>(i - 1)] = 1.0 + 1e-6 * i;
  feed.opt = feed.hub_cost[static_cast<std::size_t>(k - 1)];
  for (int i = 2; i <= k; ++i) {
    double x = 1.0 / static_cast<double>(k - i + 1);
    std::vector<RoundingCandidate> cs;
    std::vector<FracUpdate> us;
    for (int j = i; j <= k; ++j) {
      double cost = feed.hub_cost[static_cast<std::size_t>(j - 1)];
      cs.push_back({j, cost});
      us.push_back({j, x, cost});
    }
    feed.cands.push_back(std::move(cs));
    feed.updates.push_back(std::move(us));
  }
  return feed;
}

// Validates the feed: per arrival the candidate mass sums to at least one
// and every coordinate is nondecreasing over time.
inline void validate_counterexample_feed(const CounterexampleFeed& feed) {
  std::vector<double> last(static_cast<std::size_t>(feed.k) + 1, 0.0);
  for (std::size_t a = 0; a < feed.cands.size(); ++a) {
    double mass = 0;
    for (const auto& u : feed.updates[a]) {
      if (u.x < last[static_cast<std::size_t>(u.set)])
        throw InfeasibleError("counterexample feed not monotone");
      last[static_cast<std::size_t>(u.set)] = u.x;
    }
    for (const auto& c : feed.cands[a]) mass += last[static_cast<std::size_t>(c.set)];
    if (mass < 1.0 - 1e-9) throw InfeasibleError("counterexample feed infeasible");
  }
}

// Random connected instance: spanning tree plus extra edges, integer weights,
// mixed penalties (infinite / finite / zero).
inline PcNwsfInstance gen_random_pcnwsf(Rng& rng, int n, int k, long wmax, bool prize_collecting) {
  if (n < 2) throw InputError("gen_random_pcnwsf: need at least two vertices");
  std::vector<Rat> weights;
  weights.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) weights.push_back(rat(rng.next_in(0, wmax)));
  std::vector<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) edges.emplace_back(v, static_cast<int>(rng.next_below(static_cast<uint64_t>(v))));
  int extra = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
  for (int i = 0; i < extra; ++i) {
    int u = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    int v = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    if (u != v) edges.emplace_back(u, v);
  }
  PcNwsfInstance out{NodeWeightedGraph(n, std::move(weights), edges), {}};
  for (int i = 0; i < k; ++i) {
    int s = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    int t = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    while (t == s) t = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    MaybeRat penalty;
    if (prize_collecting) {
      double roll = rng.next_unit();
      if (roll < 0.3)
        penalty = std::nullopt;  // must connect
      else if (roll < 0.4)
        penalty = Rat(0);
      else
        penalty = rat(rng.next_in(1, std::max<long>(2, 2 * wmax)));
    }
    out.pairs.push_back({s, t, penalty});
  }
  return out;
}

inline NmflInstance gen_random_nmfl(Rng& rng, int n_fac, int n_clients, long fac_max,
                                    long conn_max) {
  NmflInstance inst;
  for (int f = 0; f < n_fac; ++f) inst.fac_costs.push_back(rat(rng.next_in(0, fac_max)));
  inst.conn.resize(static_cast<std::size_t>(n_clients));
  for (int c = 0; c < n_clients; ++c) {
    for (int f = 0; f < n_fac; ++f)
      if (rng.next_unit() < 0.5)
        inst.conn[static_cast<std::size_t>(c)].emplace_back(f, rat(rng.next_in(0, conn_max)));
    if (inst.conn[static_cast<std::size_t>(c)].empty()) {
      int f = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_fac)));
      inst.conn[static_cast<std::size_t>(c)].emplace_back(f, rat(rng.next_in(0, conn_max)));
    }
  }
  inst.validate();
  return inst;
}

inline nlohmann::json pcnwsf_to_json(const PcNwsfInstance& inst);
inline PcNwsfInstance pcnwsf_from_json(const nlohmann::json& j);

inline nlohmann::json pairs_to_json(const std::vector<TerminalEvent>& pairs) {
  auto arr = nlohmann::json::array();
  for (const auto& ev : pairs) {
    nlohmann::json p;
    p["s"] = ev.s;
    p["t"] = ev.t;
    if (ev.penalty)
      p["penalty"] = to_double(*ev.penalty);
    else
      p["penalty"] = "inf";
    arr.push_back(p);
  }
  return nlohmann::json{{"pairs", arr}};
}

inline std::vector<TerminalEvent> pairs_from_json(const nlohmann::json& j) {
  std::vector<TerminalEvent> out;
  for (const auto& p : j.at("pairs")) {
    TerminalEvent ev;
    ev.s = p.at("s").get<int>();
    ev.t = p.at("t").get<int>();
    const auto& pen = p.at("penalty");
    if (pen.is_string()) {
      if (pen.get<std::string>() != "inf") throw InputError("bad penalty string");
      ev.penalty = std::nullopt;
    } else if (pen.is_number_integer()) {
      ev.penalty = rat(pen.get<long>());
    } else {
      ev.penalty = rat_from_double(pen.get<double>());
    }
    out.push_back(ev);
  }
  return out;
}

inline nlohmann::json pcnwsf_to_json(const PcNwsfInstance& inst) {
  nlohmann::json j;
  j["graph"] = inst.graph.to_json();
  j["pairs"] = pairs_to_json(inst.pairs).at("pairs");
  return j;
}

inline PcNwsfInstance pcnwsf_from_json(const nlohmann::json& j) {
  return {NodeWeightedGraph::from_json(j.at("graph")),
          pairs_from_json(nlohmann::json{{"pairs", j.at("pairs")}})};
}

}  // namespace nwsf
