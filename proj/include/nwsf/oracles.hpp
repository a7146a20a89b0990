#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nwsf/covering_lp.hpp"
#include "nwsf/graph.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/steiner_online.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

struct ScOracleResult {
  Rat opt;
  std::vector<int> sets;
  long nodes_explored = 0;
};

// Exact minimum-cost set cover by branching on the lowest-id uncovered
// element. The lower bound splits each uncovered element's cheapest covering
// cost over that set's residual coverage, which keeps it admissible.
inline ScOracleResult opt_set_cover(const SetCoverInstance& inst, const std::vector<int>& elements,
                                    int set_cap = 25) {
  inst.validate();
  if (inst.n_sets() > set_cap) throw SizeCapError("set cover oracle: too many sets");
  ScOracleResult best;
  if (elements.empty()) {
    best.opt = Rat(0);
    return best;
  }

  std::vector<std::vector<int>> covers;  // per element position, covering set ids
  for (int e : elements) {
    covers.push_back(inst.covering_sets(e));
    if (covers.back().empty()) throw InfeasibleError("element covered by no set");
  }

  bool found = false;
  std::vector<int> chosen;
  long nodes = 0;

  auto lower_bound = [&](const std::vector<char>& covered) {
    Rat lb(0);
    for (std::size_t i = 0; i < covers.size(); ++i) {
      if (covered[i]) continue;
      MaybeRat cheapest;
      for (int s : covers[i]) {
        int residual = 0;
        for (std::size_t j = 0; j < covers.size(); ++j)
          if (!covered[j] &&
              std::find(covers[j].begin(), covers[j].end(), s) != covers[j].end())
            ++residual;
        Rat share = inst.set_costs[static_cast<std::size_t>(s)] / rat(residual);
        if (!cheapest || share < *cheapest) cheapest = share;
      }
      lb += *cheapest;
    }
    return lb;
  };

  std::function<void(std::vector<char>&, Rat, std::vector<int>&)> rec =
      [&](std::vector<char>& covered, Rat cost, std::vector<int>& picks) {
        ++nodes;
        std::size_t next = covers.size();
        for (std::size_t i = 0; i < covers.size(); ++i)
          if (!covered[i]) {
            next = i;
            break;
          }
        if (next == covers.size()) {
          if (!found || cost < best.opt) {
            found = true;
            best.opt = cost;
            chosen = picks;
          }
          return;
        }
        if (found && cost + lower_bound(covered) >= best.opt) return;
        for (int s : covers[next]) {
          Rat ncost = cost + inst.set_costs[static_cast<std::size_t>(s)];
          if (found && ncost >= best.opt) continue;
          std::vector<char> ncov = covered;
          for (std::size_t j = 0; j < covers.size(); ++j)
            if (!ncov[j] &&
                std::find(covers[j].begin(), covers[j].end(), s) != covers[j].end())
              ncov[j] = 1;
          picks.push_back(s);
          rec(ncov, ncost, picks);
          picks.pop_back();
        }
      };

  std::vector<char> covered(covers.size(), 0);
  std::vector<int> picks;
  rec(covered, Rat(0), picks);
  if (!found) throw InfeasibleError("set cover oracle: infeasible");

  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  best.sets = chosen;
  best.nodes_explored = nodes;

  // Witness re-validation.
  Rat check(0);
  for (int s : best.sets) check += inst.set_costs[static_cast<std::size_t>(s)];
  for (std::size_t i = 0; i < covers.size(); ++i) {
    bool ok = false;
    for (int s : best.sets)
      if (std::find(covers[i].begin(), covers[i].end(), s) != covers[i].end()) ok = true;
    if (!ok) throw ContractError("set cover oracle: witness infeasible");
  }
  if (check != best.opt) throw ContractError("set cover oracle: witness cost mismatch");
  return best;
}

struct NmflOracleResult {
  Rat opt;
  std::vector<int> open;
  std::map<int, int> assignment;
  long nodes_explored = 0;
};

// Exact offline facility location over facility subsets, with include/exclude
// branching and an admissible bound from each client's cheapest remaining
// connection option.
inline NmflOracleResult opt_nmfl(const NmflInstance& inst, const std::vector<int>& clients,
                                 int fac_cap = 20) {
  inst.validate();
  int nf = inst.n_facilities();
  if (nf > fac_cap) throw SizeCapError("nmfl oracle: too many facilities");
  NmflOracleResult best;
  if (clients.empty()) {
    best.opt = Rat(0);
    return best;
  }
  for (int c : clients)
    if (c < 0 || c >= inst.n_clients()) throw InputError("nmfl oracle: invalid client");

  bool found = false;
  std::vector<char> open(static_cast<std::size_t>(nf), 0);
  std::vector<char> best_open;
  long nodes = 0;

  auto eval = [&](const std::vector<char>& mask, bool allow_undecided, int undecided_from) -> MaybeRat {
    Rat total(0);
    for (int c : clients) {
      MaybeRat cheapest;
      for (const auto& [f, w] : inst.conn[static_cast<std::size_t>(c)]) {
        bool usable = mask[static_cast<std::size_t>(f)] || (allow_undecided && f >= undecided_from);
        if (!usable) continue;
        if (!cheapest || w < *cheapest) cheapest = w;
      }
      if (!cheapest) return std::nullopt;
      total += *cheapest;
    }
    return total;
  };

  std::function<void(int, Rat)> rec = [&](int f, Rat open_cost) {
    ++nodes;
    MaybeRat conn_lb = eval(open, true, f);
    if (!conn_lb) return;  // some client unservable on this branch
    if (found && open_cost + *conn_lb >= best.opt) return;
    if (f == nf) {
      Rat total = open_cost + *conn_lb;
      if (!found || total < best.opt) {
        found = true;
        best.opt = total;
        best_open = open;
      }
      return;
    }
    open[static_cast<std::size_t>(f)] = 1;
    rec(f + 1, open_cost + inst.fac_costs[static_cast<std::size_t>(f)]);
    open[static_cast<std::size_t>(f)] = 0;
    rec(f + 1, open_cost);
  };
  rec(0, Rat(0));
  if (!found) throw InfeasibleError("nmfl oracle: infeasible");

  best.nodes_explored = nodes;
  Rat check(0);
  for (int f = 0; f < nf; ++f)
    if (best_open[static_cast<std::size_t>(f)]) {
      best.open.push_back(f);
      check += inst.fac_costs[static_cast<std::size_t>(f)];
    }
  for (int c : clients) {
    MaybeRat cheapest;
    int which = -1;
    for (const auto& [f, w] : inst.conn[static_cast<std::size_t>(c)]) {
      if (!best_open[static_cast<std::size_t>(f)]) continue;
      if (!cheapest || w < *cheapest || (w == *cheapest && f < which)) {
        cheapest = w;
        which = f;
      }
    }
    if (!cheapest) throw ContractError("nmfl oracle: witness infeasible");
    best.assignment[c] = which;
    check += *cheapest;
  }
  if (check != best.opt) throw ContractError("nmfl oracle: witness cost mismatch");
  return best;
}

struct PcNwsfInstance {
  NodeWeightedGraph graph;
  std::vector<TerminalEvent> pairs;
};

struct NwsfOracleResult {
  Rat opt;
  std::vector<int> bought;       // non-terminal vertices
  std::vector<char> penalized;   // per pair
  long nodes_explored = 0;
};

// Exact offline prize-collecting optimum. Terminals are free on both sides;
// the search runs over non-terminal vertices, paying the penalty of every
// pair the selection leaves disconnected.
inline NwsfOracleResult opt_pc_nwsf(const NodeWeightedGraph& g,
                                    const std::vector<TerminalEvent>& pairs, int n_cap = 20,
                                    int k_cap = 10) {
  if (g.vertex_count() > n_cap) throw SizeCapError("pc-nwsf oracle: graph too large");
  if (static_cast<int>(pairs.size()) > k_cap) throw SizeCapError("pc-nwsf oracle: too many pairs");
  for (const auto& ev : pairs) {
    g.check_vertex(ev.s);
    g.check_vertex(ev.t);
  }

  std::vector<char> is_terminal(static_cast<std::size_t>(g.vertex_count()), 0);
  for (const auto& ev : pairs) {
    is_terminal[static_cast<std::size_t>(ev.s)] = 1;
    is_terminal[static_cast<std::size_t>(ev.t)] = 1;
  }
  std::vector<int> candidates;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (!is_terminal[static_cast<std::size_t>(v)]) candidates.push_back(v);
  // Cheaper vertices first helps the bound.
  std::sort(candidates.begin(), candidates.end(),
            [&](int a, int b) { return g.weight(a) < g.weight(b); });

  auto evaluate = [&](const std::vector<char>& in) -> MaybeRat {
    UnionFind uf(g.vertex_count());
    auto present = [&](int v) {
      return is_terminal[static_cast<std::size_t>(v)] || in[static_cast<std::size_t>(v)];
    };
    for (auto [u, v] : g.edges())
      if (present(u) && present(v)) uf.unite(u, v);
    Rat total(0);
    for (const auto& ev : pairs) {
      if (uf.same(ev.s, ev.t)) continue;
      if (!ev.penalty) return std::nullopt;  // must be connected but is not
      total += *ev.penalty;
    }
    return total;
  };

  NwsfOracleResult best;
  bool found = false;
  std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
  std::vector<char> best_in;
  std::vector<char> best_pen;
  long nodes = 0;

  std::function<void(std::size_t, Rat)> rec = [&](std::size_t i, Rat weight) {
    ++nodes;
    if (found && weight >= best.opt) return;
    if (i == candidates.size()) {
      MaybeRat pen = evaluate(in);
      if (!pen) return;
      Rat total = weight + *pen;
      if (!found || total < best.opt) {
        found = true;
        best.opt = total;
        best_in = in;
      }
      return;
    }
    int v = candidates[i];
    // Zero-weight vertices are free; taking them never hurts.
    if (g.weight(v) == 0) {
      in[static_cast<std::size_t>(v)] = 1;
      rec(i + 1, weight);
      in[static_cast<std::size_t>(v)] = 0;
      return;
    }
    in[static_cast<std::size_t>(v)] = 1;
    rec(i + 1, weight + g.weight(v));
    in[static_cast<std::size_t>(v)] = 0;
    rec(i + 1, weight);
  };
  rec(0, Rat(0));
  if (!found) throw InfeasibleError("pc-nwsf oracle: infeasible");

  best.nodes_explored = nodes;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (best_in[static_cast<std::size_t>(v)]) best.bought.push_back(v);

  // Re-validate the witness and record which pairs pay penalties.
  UnionFind uf(g.vertex_count());
  auto present = [&](int v) {
    return is_terminal[static_cast<std::size_t>(v)] || best_in[static_cast<std::size_t>(v)];
  };
  for (auto [u, v] : g.edges())
    if (present(u) && present(v)) uf.unite(u, v);
  Rat check(0);
  for (int v : best.bought) check += g.weight(v);
  best.penalized.assign(pairs.size(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (uf.same(pairs[i].s, pairs[i].t)) continue;
    if (!pairs[i].penalty) throw ContractError("pc-nwsf oracle: witness infeasible");
    best.penalized[i] = 1;
    check += *pairs[i].penalty;
  }
  if (check != best.opt) throw ContractError("pc-nwsf oracle: witness cost mismatch");
  return best;
}

struct WitnessAssignment {
  int client_id = -1;
  int facility = -1;   // vertex id, or -1 when resolved by the penalty facility
  Rat opening_paid;    // scaled opening cost charged for this client's facility
  Rat connection;      // d_G(terminal, facility) or the penalty
};

struct WitnessResult {
  bool feasible = false;
  Rat cost;
  Rat opening_cost;
  Rat connection_cost;
  Rat penalty_cost;
  std::vector<WitnessAssignment> assignments;
  std::string failure;
};

// Builds a feasible solution to the auxiliary facility-location instance out
// of an offline forest: open every forest vertex at ell times its weight and
// route each emitted client to a vertex cut by its ball radius. Clients whose
// pair the forest leaves disconnected fall back to the penalty facility.
inline WitnessResult lemma1_witness(const NodeWeightedGraph& g, const std::vector<int>& forest,
                                    const std::vector<char>& is_terminal,
                                    const std::vector<EmittedClient>& clients, long ell) {
  WitnessResult out;
  std::set<int> forest_set(forest.begin(), forest.end());
  for (int v : forest) out.opening_cost += rat(ell) * g.weight(v);

  UnionFind uf(g.vertex_count());
  auto present = [&](int v) {
    return forest_set.count(v) != 0 || is_terminal[static_cast<std::size_t>(v)] != 0;
  };
  for (auto [u, v] : g.edges())
    if (present(u) && present(v)) uf.unite(u, v);

  std::set<int> extra_opened;
  for (const auto& c : clients) {
    WitnessAssignment wa;
    wa.client_id = c.client_id;
    bool pair_connected = present(c.terminal) && present(c.other) && uf.same(c.terminal, c.other);
    if (!pair_connected) {
      if (!c.penalty) {
        out.failure = "forest leaves a mandatory pair disconnected";
        return out;
      }
      wa.facility = -1;
      wa.connection = *c.penalty;
      out.penalty_cost += *c.penalty;
      out.assignments.push_back(wa);
      continue;
    }
    ShortestPaths sp(g, nullptr, c.terminal);
    Rat r = pow2(c.level - 3);
    // Valid exits are forest vertices or terminals cut by the ball radius.
    // Terminal exits open for free: a terminal's weight counts for nobody.
    MaybeRat best_cost;
    int best_v = -1;
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (v == c.terminal || !sp.reachable(v)) continue;
      if (!(sp.dist(v) < r && r <= sp.dist(v) + g.weight(v))) continue;
      bool in_forest = forest_set.count(v) != 0;
      bool term = is_terminal[static_cast<std::size_t>(v)] != 0;
      if (!in_forest && !term) continue;
      Rat total = sp.dist(v);
      if (!best_cost || total < *best_cost) {
        best_cost = total;
        best_v = v;
      }
    }
    if (best_v < 0) {
      out.failure = "no boundary vertex available for an emitted client";
      return out;
    }
    wa.facility = best_v;
    wa.connection = sp.dist(best_v);
    extra_opened.insert(best_v);
    out.connection_cost += wa.connection;
    out.assignments.push_back(wa);
  }
  out.feasible = true;
  out.cost = out.opening_cost + out.connection_cost + out.penalty_cost;
  return out;
}

// The quantity the witness bound compares against: the oracle's objective
// plus the weights of terminals belonging to pairs the oracle connects (a
// solution in the uncancelled model contains those terminals).
inline Rat witness_reference_opt(const NodeWeightedGraph& g,
                                 const std::vector<TerminalEvent>& pairs,
                                 const NwsfOracleResult& oracle) {
  std::set<int> terms;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i < oracle.penalized.size() && oracle.penalized[i]) continue;
    terms.insert(pairs[i].s);
    terms.insert(pairs[i].t);
  }
  Rat total = oracle.opt;
  for (int v : terms) total += g.weight(v);
  return total;
}

}  // namespace nwsf
