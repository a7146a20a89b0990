#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "nwsf/graph.hpp"
#include "nwsf/nmfl_online.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

struct TerminalEvent {
  int s = -1;
  int t = -1;
  MaybeRat penalty;  // empty = infinite (the pair must be connected)
};

inline long ell_for_pairs(long k) { return std::max<long>(1, k > 1 ? ceil_log2(rat(k)) : 1); }

struct DriverConfig {
  long k = 2;  // declared number of pairs; controls ell and the rounder's size guess
  bool prize_collecting = false;
  uint64_t seed = 1;
  double p_factor = 2.0;
  bool budget_doubling = true;
  bool p_doubling = false;
  NmflMode nmfl_mode = NmflMode::Randomized;
  Rat eps = pow2(-20);
};

enum class StepAction {
  ShortCircuit,      // pair already connected for free
  ClientEmitted,     // facility bought through the auxiliary instance
  AugGreedy,         // both endpoints tied into same-level structure
  PenaltyPaid,       // auxiliary instance picked the penalty facility
  PenaltyDirect,     // disconnected pair with a finite penalty
  DegenerateGreedy,  // empty boundary, no penalty facility available
};

struct DriverStep {
  int index = -1;
  int s = -1, t = -1;
  MaybeRat penalty;
  StepAction action = StepAction::ShortCircuit;
  long level = -1;
  int client_terminal = -1;   // which endpoint became the client, if any
  Rat path_metric;            // w(P) in G/S when the pair arrived
  Rat greedy_paid;
  Rat aug_metric_s, aug_metric_t;
  Rat aug_paid_s, aug_paid_t;
  int facility = -1;
  Rat facility_dG;            // d_G(client terminal, facility)
  Rat facility_paid;
  Rat connection_paid;
  Rat penalty_paid;
  std::vector<int> purchased;  // vertices newly added to S
};

struct EmittedClient {
  int client_id = -1;
  int terminal = -1;
  long level = 0;
  int pair_index = -1;
  int other = -1;
  MaybeRat penalty;
  bool penalized = false;
};

// Online (prize-collecting) node-weighted Steiner forest. Buys the greedy
// path for every pair, classifies the pair into a dyadic level, and either
// emits one endpoint as a client of the auxiliary facility-location instance
// or ties both endpoints into same-level structure bought earlier. Terminal
// weights count for neither side once the terminal has arrived.
class SteinerDriver {
 public:
  SteinerDriver(NodeWeightedGraph g, DriverConfig cfg)
      : g_(std::move(g)),
        cfg_(cfg),
        ell_(ell_for_pairs(cfg.k)),
        bought_(g_.vertex_count()),
        terminal_(static_cast<std::size_t>(g_.vertex_count()), 0),
        nmfl_(make_nmfl_config(cfg, g_.vertex_count())) {}

  DriverStep arrive(const TerminalEvent& ev) {
    g_.check_vertex(ev.s);
    g_.check_vertex(ev.t);
    if (ev.s == ev.t) throw InputError("terminal pair with identical endpoints");
    if (ev.penalty && *ev.penalty < 0) throw InputError("negative penalty");

    DriverStep step;
    step.index = static_cast<int>(trace_.size());
    step.s = ev.s;
    step.t = ev.t;
    step.penalty = ev.penalty;
    terminal_[static_cast<std::size_t>(ev.s)] = 1;
    terminal_[static_cast<std::size_t>(ev.t)] = 1;

    DistResult path = overlay_dist(ev.s, ev.t);
    if (!path.reachable) {
      if (cfg_.prize_collecting && ev.penalty) {
        step.action = StepAction::PenaltyDirect;
        step.penalty_paid = *ev.penalty;
        penalty_paid_ += *ev.penalty;
        trace_.push_back(step);
        return step;
      }
      throw InfeasibleError("terminal pair is disconnected");
    }

    step.path_metric = path.cost;
    if (path.cost == 0) {
      step.action = StepAction::ShortCircuit;
      step.greedy_paid = buy_path(path.path, step);
      trace_.push_back(step);
      return step;
    }

    long j = std::max<long>(0, ceil_log2(path.cost));
    step.level = j;

    bool resolved_by_penalty = false;
    if (guard_holds(ev.s, ev.t, j)) {
      resolved_by_penalty = emit_client(ev.s, ev.t, j, ev, step);
    } else if (guard_holds(ev.t, ev.s, j)) {
      resolved_by_penalty = emit_client(ev.t, ev.s, j, ev, step);
    } else {
      step.action = StepAction::AugGreedy;
      std::vector<int> targets = level_targets(j, ev.s, ev.t);
      if (targets.empty()) throw ContractError("augmented greedy with empty target set");
      DistResult ps = overlay_dist_to_set(ev.s, targets);
      if (!ps.reachable) throw ContractError("augmented greedy target unreachable");
      step.aug_metric_s = ps.cost;
      step.aug_paid_s = buy_path(ps.path, step);
      DistResult pt = overlay_dist_to_set(ev.t, targets);
      if (!pt.reachable) throw ContractError("augmented greedy target unreachable");
      step.aug_metric_t = pt.cost;
      step.aug_paid_t = buy_path(pt.path, step);
      aug_paid_ += step.aug_paid_s + step.aug_paid_t;
    }

    if (!resolved_by_penalty) {
      registry_t_[j].insert(ev.s);
      registry_t_[j].insert(ev.t);
      step.greedy_paid = buy_path(path.path, step);
      greedy_paid_ += step.greedy_paid;
    }
    trace_.push_back(step);
    return step;
  }

  const NodeWeightedGraph& graph() const { return g_; }
  const BoughtSet& bought() const { return bought_; }
  const std::vector<char>& terminals() const { return terminal_; }
  const std::vector<DriverStep>& trace() const { return trace_; }
  const std::vector<EmittedClient>& emitted_clients() const { return emitted_; }
  const NmflOnline& nmfl() const { return nmfl_; }
  long ell() const { return ell_; }
  long degeneracy_count() const { return degeneracy_; }

  const std::map<long, std::set<int>>& terminal_registry() const { return registry_t_; }
  const std::map<long, std::set<int>>& facility_registry() const { return registry_f_; }

  Rat greedy_paid() const { return greedy_paid_; }
  Rat aug_paid() const { return aug_paid_; }
  Rat facility_paid() const { return facility_paid_; }
  Rat connection_paid() const { return connection_paid_; }
  Rat penalty_paid() const { return penalty_paid_; }
  Rat total_paid() const {
    return greedy_paid_ + aug_paid_ + facility_paid_ + connection_paid_ + penalty_paid_;
  }

  // True when every pair is either penalty-resolved or connected in G[S].
  bool all_pairs_feasible() const {
    UnionFind uf(g_.vertex_count());
    for (auto [u, v] : g_.edges())
      if (bought_.contains(u) && bought_.contains(v)) uf.unite(u, v);
    for (const auto& st : trace_) {
      if (st.action == StepAction::PenaltyPaid || st.action == StepAction::PenaltyDirect) continue;
      if (!bought_.contains(st.s) || !bought_.contains(st.t)) return false;
      if (!uf.same(st.s, st.t)) return false;
    }
    return true;
  }

 private:
  static NmflConfig make_nmfl_config(const DriverConfig& cfg, int n) {
    NmflConfig nc;
    nc.level_cap = 0;
    nc.eps = cfg.eps;
    nc.mode = cfg.nmfl_mode;
    nc.rounding.seed = Rng(cfg.seed).substream(0x5aU).next_u64();
    nc.rounding.p_factor = cfg.p_factor;
    nc.rounding.element_guess = 2 * std::max<long>(1, cfg.k) * (ell_for_pairs(cfg.k) + 1);
    nc.rounding.budget_doubling = cfg.budget_doubling;
    nc.rounding.p_doubling = cfg.p_doubling;
    (void)n;
    return nc;
  }

  int f0_id() const { return g_.vertex_count(); }

  const ShortestPaths& pristine_sssp(int source) {
    auto it = sssp_cache_.find(source);
    if (it == sssp_cache_.end())
      it = sssp_cache_.emplace(source, std::make_unique<ShortestPaths>(g_, nullptr, source)).first;
    return *it->second;
  }

  DistResult overlay_dist(int u, int v) {
    DistResult r;
    if (u == v) {
      r.reachable = true;
      r.cost = Rat(0);
      r.path = {u};
      r.hit = u;
      return r;
    }
    ShortestPaths sp(g_, &bought_, u, &terminal_);
    if (!sp.reachable(v)) return r;
    r.reachable = true;
    r.cost = sp.dist(v);
    r.path = sp.path_to(v);
    r.hit = v;
    return r;
  }

  DistResult overlay_dist_to_set(int u, const std::vector<int>& targets) {
    for (int t : targets)
      if (t == u) return overlay_dist(u, u);
    ShortestPaths sp(g_, &bought_, u, &terminal_);
    DistResult best;
    for (int t : targets) {
      if (!sp.reachable(t)) continue;
      if (!best.reachable || sp.dist(t) < best.cost || (sp.dist(t) == best.cost && t < best.hit)) {
        best.reachable = true;
        best.cost = sp.dist(t);
        best.hit = t;
      }
    }
    if (best.reachable) best.path = sp.path_to(best.hit);
    return best;
  }

  // Same-level terminals other than the arriving pair, plus level facilities.
  std::vector<int> level_targets(long j, int s, int t) {
    std::set<int> targets;
    auto it = registry_t_.find(j);
    if (it != registry_t_.end())
      for (int v : it->second)
        if (v != s && v != t) targets.insert(v);
    auto fit = registry_f_.find(j);
    if (fit != registry_f_.end())
      for (int v : fit->second) targets.insert(v);
    return {targets.begin(), targets.end()};
  }

  // d_G(x, T_j \ {s,t}) >= 2^{j-2} and Bd(x, 2^{j-3}) disjoint from F_j.
  bool guard_holds(int x, int other, long j) {
    const ShortestPaths& sp = pristine_sssp(x);
    Rat quarter = pow2(j - 2);
    auto it = registry_t_.find(j);
    if (it != registry_t_.end()) {
      for (int v : it->second) {
        if (v == x || v == other) continue;
        if (sp.reachable(v) && sp.dist(v) < quarter) return false;
      }
    }
    auto fit = registry_f_.find(j);
    if (fit != registry_f_.end() && !fit->second.empty()) {
      Rat r = pow2(j - 3);
      for (int v : fit->second) {
        if (v == x || !sp.reachable(v)) continue;
        if (sp.dist(v) < r && r <= sp.dist(v) + g_.weight(v)) return false;
      }
    }
    return true;
  }

  // Returns true when the pair was resolved by paying its penalty.
  bool emit_client(int x, int other, long j, const TerminalEvent& ev, DriverStep& step) {
    const ShortestPaths& sp = pristine_sssp(x);
    Rat r = pow2(j - 3);
    std::vector<FacCandidate> cands;
    for (int v = 0; v < g_.vertex_count(); ++v) {
      if (v == x || !sp.reachable(v)) continue;
      if (sp.dist(v) < r && r <= sp.dist(v) + g_.weight(v)) {
        // Arrived terminals are free on both sides of the ledger, so their
        // facility price is zero as well.
        Rat open = terminal_[static_cast<std::size_t>(v)] ? Rat(0) : rat(ell_) * g_.weight(v);
        cands.push_back({v, open, sp.dist(v)});
      }
    }
    if (cfg_.prize_collecting && ev.penalty)
      cands.push_back({f0_id(), Rat(0), *ev.penalty});

    if (cands.empty()) {
      step.action = StepAction::DegenerateGreedy;
      ++degeneracy_;
      return false;
    }

    int client_id = next_client_++;
    NmflStep ns = nmfl_.arrive(client_id, cands);
    EmittedClient ec{client_id, x, j, step.index, other, ev.penalty, ns.facility == f0_id()};
    emitted_.push_back(ec);

    if (ns.facility == f0_id()) {
      step.action = StepAction::PenaltyPaid;
      step.client_terminal = x;
      step.penalty_paid = *ev.penalty;
      penalty_paid_ += *ev.penalty;
      return true;
    }

    step.action = StepAction::ClientEmitted;
    step.client_terminal = x;
    step.facility = ns.facility;
    step.facility_dG = sp.dist(ns.facility);
    registry_f_[j].insert(ns.facility);
    step.facility_paid = buy_vertex(ns.facility, step);
    facility_paid_ += step.facility_paid;
    DistResult conn = overlay_dist(x, ns.facility);
    if (!conn.reachable) throw ContractError("assigned facility unreachable");
    step.connection_paid = buy_path(conn.path, step);
    connection_paid_ += step.connection_paid;
    return false;
  }

  Rat buy_vertex(int v, DriverStep& step) {
    if (bought_.contains(v)) return Rat(0);
    bought_.add(v);
    step.purchased.push_back(v);
    return terminal_[static_cast<std::size_t>(v)] ? Rat(0) : g_.weight(v);
  }

  Rat buy_path(const std::vector<int>& path, DriverStep& step) {
    Rat paid(0);
    for (int v : path) paid += buy_vertex(v, step);
    return paid;
  }

  NodeWeightedGraph g_;
  DriverConfig cfg_;
  long ell_;
  BoughtSet bought_;
  std::vector<char> terminal_;
  NmflOnline nmfl_;
  std::map<long, std::set<int>> registry_t_, registry_f_;
  std::map<int, std::unique_ptr<ShortestPaths>> sssp_cache_;
  std::vector<DriverStep> trace_;
  std::vector<EmittedClient> emitted_;
  int next_client_ = 0;
  long degeneracy_ = 0;
  Rat greedy_paid_, aug_paid_, facility_paid_, connection_paid_, penalty_paid_;
};

// Shared grow-only purchase record used by the doubling wrappers. Vertices
// are charged once; a terminal's own weight is never charged; penalties are
// paid at most once per pair.
class RealLedger {
 public:
  explicit RealLedger(const NodeWeightedGraph& g) : g_(g), bought_(g.vertex_count()) {}

  void mark_terminal(int v) { terminals_.insert(v); }

  void charge_vertex(int v) {
    if (bought_.add(v) && !terminals_.count(v)) vertex_cost_ += g_.weight(v);
  }

  void pay_penalty(int pair_index, const Rat& p) { penalties_.emplace(pair_index, p); }

  const BoughtSet& bought() const { return bought_; }
  bool penalty_paid(int pair_index) const { return penalties_.count(pair_index) != 0; }

  Rat penalty_total() const {
    Rat s(0);
    for (const auto& [idx, p] : penalties_) s += p;
    return s;
  }

  Rat vertex_cost() const { return vertex_cost_; }
  Rat total() const { return vertex_cost_ + penalty_total(); }
  const std::set<int>& terminals() const { return terminals_; }

  bool pair_feasible(int s, int t, int pair_index) const {
    if (penalties_.count(pair_index)) return true;
    UnionFind uf(g_.vertex_count());
    for (auto [u, v] : g_.edges())
      if (bought_.contains(u) && bought_.contains(v)) uf.unite(u, v);
    return bought_.contains(s) && bought_.contains(t) && uf.same(s, t);
  }

 private:
  const NodeWeightedGraph& g_;
  BoughtSet bought_;
  std::set<int> terminals_;
  std::map<int, Rat> penalties_;
  Rat vertex_cost_;
};

struct WrapperStep {
  bool reset = false;
  bool greedy_serviced = false;
  bool penalty_paid = false;
};

// Distance-scale management: tracks alpha_i = max over arrived pairs of
// min(d_G(s,t), p) and a guess beta with beta <= alpha_i <= k*beta between
// resets. On a reset the inner driver restarts on the rescaled graph, small
// pairs are serviced greedily, and the rest replay in order.
class ScaleWrapper {
 public:
  ScaleWrapper(const NodeWeightedGraph& g, long k, DriverConfig cfg, RealLedger* ledger = nullptr)
      : g_(g), k_(std::max<long>(2, k)), cfg_(cfg) {
    if (!ledger) {
      own_ledger_ = std::make_unique<RealLedger>(g_);
      ledger = own_ledger_.get();
    }
    ledger_ = ledger;
  }

  WrapperStep arrive(const TerminalEvent& ev) {
    g_.check_vertex(ev.s);
    g_.check_vertex(ev.t);
    WrapperStep out;
    int idx = static_cast<int>(events_.size());
    events_.push_back(ev);
    ledger_->mark_terminal(ev.s);
    ledger_->mark_terminal(ev.t);

    Rat m = service_value(ev);
    if (m > alpha_) alpha_ = m;
    // beta stays zero while every arrived pair is free; such pairs are
    // serviced greedily at no cost and the invariant beta <= alpha <= k*beta
    // holds as 0 <= 0 <= 0.
    if (beta_ == 0 && alpha_ > 0) {
      beta_ = alpha_;
      rebuild_inner();
    } else if (beta_ > 0 && alpha_ > rat(k_) * beta_) {
      beta_ = alpha_;
      out.reset = true;
      reset_indices_.push_back(idx);
      rebuild_inner();
      for (int i = 0; i < idx; ++i) route(events_[static_cast<std::size_t>(i)], i, nullptr);
    }
    alpha_trace_.push_back(alpha_);
    beta_trace_.push_back(beta_);
    route(ev, idx, &out);
    return out;
  }

  const std::vector<int>& reset_indices() const { return reset_indices_; }
  const std::vector<Rat>& alpha_trace() const { return alpha_trace_; }
  const std::vector<Rat>& beta_trace() const { return beta_trace_; }
  long k() const { return k_; }
  const RealLedger& ledger() const { return *ledger_; }
  const std::vector<TerminalEvent>& events() const { return events_; }

  bool all_pairs_feasible() const {
    for (int i = 0; i < static_cast<int>(events_.size()); ++i) {
      const auto& ev = events_[static_cast<std::size_t>(i)];
      if (!ledger_->pair_feasible(ev.s, ev.t, i)) return false;
    }
    return true;
  }

 private:
  Rat service_value(const TerminalEvent& ev) const {
    BoughtSet empty(g_.vertex_count());
    DistResult d = dist_excluding(g_, empty, ev.s, ev.t);
    if (!d.reachable) {
      if (!ev.penalty) throw InfeasibleError("disconnected pair with infinite penalty");
      return *ev.penalty;
    }
    if (ev.penalty && *ev.penalty < d.cost) return *ev.penalty;
    return d.cost;
  }

  void rebuild_inner() {
    std::vector<Rat> scaled;
    scaled.reserve(static_cast<std::size_t>(g_.vertex_count()));
    for (int v = 0; v < g_.vertex_count(); ++v) scaled.push_back(g_.weight(v) / beta_);
    DriverConfig inner_cfg = cfg_;
    inner_cfg.k = k_;
    inner_cfg.seed = Rng(cfg_.seed).substream(static_cast<uint64_t>(epoch_)).next_u64();
    ++epoch_;
    inner_ = std::make_unique<SteinerDriver>(
        NodeWeightedGraph(g_.vertex_count(), std::move(scaled), g_.edges()), inner_cfg);
  }

  void route(const TerminalEvent& ev, int pair_index, WrapperStep* out) {
    Rat m = service_value(ev);
    if (beta_ == 0 || m < beta_ / rat(k_)) {
      service_greedily(ev, pair_index);
      if (out) out->greedy_serviced = true;
      return;
    }
    TerminalEvent scaled = ev;
    if (scaled.penalty) scaled.penalty = *scaled.penalty / beta_;
    DriverStep st = inner_->arrive(scaled);
    for (int v : st.purchased) ledger_->charge_vertex(v);
    if (st.action == StepAction::PenaltyPaid || st.action == StepAction::PenaltyDirect) {
      ledger_->pay_penalty(pair_index, *ev.penalty);
      if (out) out->penalty_paid = true;
    }
  }

  void service_greedily(const TerminalEvent& ev, int pair_index) {
    ShortestPaths sp(g_, &ledger_->bought(), ev.s, &terminal_mask());
    bool reach = sp.reachable(ev.t);
    if (ev.penalty && (!reach || *ev.penalty < sp.dist(ev.t))) {
      ledger_->pay_penalty(pair_index, *ev.penalty);
      return;
    }
    if (!reach) throw InfeasibleError("disconnected pair with infinite penalty");
    for (int v : sp.path_to(ev.t)) ledger_->charge_vertex(v);
  }

  const std::vector<char>& terminal_mask() {
    mask_.assign(static_cast<std::size_t>(g_.vertex_count()), 0);
    for (int v : ledger_->terminals()) mask_[static_cast<std::size_t>(v)] = 1;
    return mask_;
  }

  const NodeWeightedGraph& g_;
  long k_;
  DriverConfig cfg_;
  RealLedger* ledger_ = nullptr;
  std::unique_ptr<RealLedger> own_ledger_;
  std::unique_ptr<SteinerDriver> inner_;
  std::vector<TerminalEvent> events_;
  std::vector<int> reset_indices_;
  std::vector<Rat> alpha_trace_, beta_trace_;
  std::vector<char> mask_;
  Rat alpha_, beta_;
  int epoch_ = 0;
};

// Pair-count management: k starts at 2 and squares at arrival indices
// 2^{2^m}; each squaring reinitializes the scale wrapper and replays the
// prefix. Purchases accumulate in the shared ledger.
class KDoublingWrapper {
 public:
  KDoublingWrapper(const NodeWeightedGraph& g, DriverConfig cfg)
      : g_(g), cfg_(cfg), ledger_(std::make_unique<RealLedger>(g_)) {
    inner_ = std::make_unique<ScaleWrapper>(g_, k_, cfg_, ledger_.get());
  }

  WrapperStep arrive(const TerminalEvent& ev) {
    long i = static_cast<long>(events_.size()) + 1;  // 1-based arrival index
    if (is_tower_index(i)) {
      k_ = k_ * k_;
      reinit_indices_.push_back(i);
      DriverConfig cfg = cfg_;
      cfg.seed = Rng(cfg_.seed).substream(static_cast<uint64_t>(reinit_indices_.size())).next_u64();
      inner_ = std::make_unique<ScaleWrapper>(g_, k_, cfg, ledger_.get());
      for (const auto& e : events_) inner_->arrive(e);
    }
    events_.push_back(ev);
    return inner_->arrive(ev);
  }

  static bool is_tower_index(long i) {
    for (long m = 1; m < 6; ++m) {
      long tower = 1L << (1L << m);  // 4, 16, 256, 65536, ...
      if (i == tower) return true;
      if (tower > i) break;
    }
    return false;
  }

  long k() const { return k_; }
  const std::vector<long>& reinit_indices() const { return reinit_indices_; }
  const RealLedger& ledger() const { return *ledger_; }
  const ScaleWrapper& scale_wrapper() const { return *inner_; }

  bool all_pairs_feasible() const {
    for (int i = 0; i < static_cast<int>(events_.size()); ++i) {
      const auto& ev = events_[static_cast<std::size_t>(i)];
      if (!ledger_->pair_feasible(ev.s, ev.t, i)) return false;
    }
    return true;
  }

 private:
  const NodeWeightedGraph& g_;
  DriverConfig cfg_;
  std::unique_ptr<RealLedger> ledger_;
  std::unique_ptr<ScaleWrapper> inner_;
  std::vector<TerminalEvent> events_;
  std::vector<long> reinit_indices_;
  long k_ = 2;
};

}  // namespace nwsf
