#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "nwsf/covering_lp.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/sc_rounding.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

// Connection/facility cost preprocessing: measured in units of opt_guess/k,
// costs below one unit drop to zero, the rest round up to powers of two, and
// anything above k^2 units is unusable. Output costs are in scaled units.
struct PreprocessedNmfl {
  NmflInstance instance;                 // scaled, rounded costs
  std::vector<char> facility_usable;    // false when opening cost > k^2
};

inline MaybeRat preprocess_conn_cost(const Rat& raw, const Rat& opt_guess, long k) {
  if (!(opt_guess > 0)) throw InputError("preprocess: opt_guess must be positive");
  Rat scaled = raw * rat(k) / opt_guess;
  if (scaled < 1) return Rat(0);
  if (scaled > rat(k) * rat(k)) return std::nullopt;  // treated as infinite
  return ceil_pow2(scaled);
}

inline PreprocessedNmfl preprocess_costs(const NmflInstance& inst, const Rat& opt_guess, long k) {
  if (!(opt_guess > 0)) throw InputError("preprocess: opt_guess must be positive");
  PreprocessedNmfl out;
  Rat cap = rat(k) * rat(k);
  out.facility_usable.assign(static_cast<std::size_t>(inst.n_facilities()), 1);
  for (int f = 0; f < inst.n_facilities(); ++f) {
    Rat scaled = inst.fac_costs[static_cast<std::size_t>(f)] * rat(k) / opt_guess;
    if (scaled > cap) out.facility_usable[static_cast<std::size_t>(f)] = 0;
    out.instance.fac_costs.push_back(scaled);
  }
  out.instance.conn.resize(inst.conn.size());
  for (int c = 0; c < inst.n_clients(); ++c) {
    for (const auto& [f, w] : inst.conn[static_cast<std::size_t>(c)]) {
      if (!out.facility_usable[static_cast<std::size_t>(f)]) continue;
      MaybeRat pc = preprocess_conn_cost(w, opt_guess, k);
      if (!pc) continue;
      out.instance.conn[static_cast<std::size_t>(c)].emplace_back(f, *pc);
    }
  }
  return out;
}

struct SelectedLevel {
  long level = 0;       // index j; threshold is 2^j, or 0 in the zero-mass case
  Rat threshold;        // 0 or 2^level
  bool zero_mass = false;
};

// Minimal connection-cost level whose candidate prefix carries at least half
// of the client's fractional mass. The zero threshold is checked first so a
// client whose mass sits on free connections pays nothing.
inline SelectedLevel select_level(const FractionalState& state, int client,
                                  const std::vector<FacCandidate>& candidates,
                                  long level_cap) {
  Rat zero_mass(0), total(0);
  Rat max_conn(0);
  for (const auto& c : candidates) {
    const Rat& x = state.x_conn(client, c.facility);
    total += x;
    if (c.conn_cost == 0) zero_mass += x;
    if (c.conn_cost > max_conn) max_conn = c.conn_cost;
  }
  Rat half = rat(1, 2);
  if (zero_mass >= half) return {0, Rat(0), true};
  long cap = level_cap;
  if (max_conn > 0) cap = std::max(cap, ceil_log2(max_conn));
  for (long j = 0; j <= cap; ++j) {
    Rat thr = pow2(j);
    Rat mass(0);
    for (const auto& c : candidates)
      if (c.conn_cost <= thr) mass += state.x_conn(client, c.facility);
    if (mass >= half) return {j, thr, false};
  }
  throw ContractError("select_level: no level reached half mass");
}

enum class NmflMode { Randomized, DeterministicGreedy };

struct NmflConfig {
  long level_cap = 0;        // minimum cap; extended to cover observed costs
  RoundingConfig rounding;
  Rat eps = pow2(-20);
  NmflMode mode = NmflMode::Randomized;
  // Optional guess management: rebuild preprocessing grid on violation.
  bool preprocess = false;
  Rat opt_guess = Rat(1);
  long k = 2;
};

struct NmflStep {
  int client = -1;
  SelectedLevel level;
  int facility = -1;          // assigned facility
  Rat facility_cost_step;     // opening costs newly paid this step
  Rat connection_cost;        // instance cost of the chosen connection
  bool fallback = false;
  bool opt_guess_doubled = false;
};

inline constexpr long kLevelStride = 64;

// Online non-metric facility location: maintain the monotone fractional LP,
// pick a connection-cost level per client, and delegate facility opening to
// the set-cover rounder over (client, level) elements with set values 2*x_f.
class NmflOnline {
 public:
  explicit NmflOnline(NmflConfig cfg) : cfg_(cfg), rounder_(cfg.rounding) {}

  NmflStep arrive(int client, std::vector<FacCandidate> candidates) {
    if (candidates.empty()) throw InfeasibleError("nmfl client with no candidates");
    if (cfg_.preprocess) {
      // An unservable client forces the guess upward before anything else.
      std::vector<FacCandidate> usable = apply_preprocessing(candidates);
      while (usable.empty()) {
        cfg_.opt_guess *= 2;
        ++guess_rebuilds_;
        usable = apply_preprocessing(candidates);
      }
      candidates = std::move(usable);
    }
    if (candidates.empty()) throw InfeasibleError("nmfl client with no usable candidates");
    std::sort(candidates.begin(), candidates.end(),
              [](const FacCandidate& a, const FacCandidate& b) { return a.facility < b.facility; });
    for (const auto& c : candidates) open_cost_exact_[c.facility] = c.open_cost;

    NmflStep step;
    step.client = client;
    std::vector<int> changed = fnmfl_arrive(frac_, client, candidates, cfg_.eps);
    for (const auto& c : candidates) conn_cost_of_[{client, c.facility}] = c.conn_cost;

    step.level = select_level(frac_, client, candidates, cfg_.level_cap);
    if (step.level.level >= kLevelStride - 1) throw SizeCapError("nmfl level out of range");

    std::vector<FacCandidate> eligible;
    for (const auto& c : candidates) {
      bool in = step.level.zero_mass ? (c.conn_cost == 0) : (c.conn_cost <= step.level.threshold);
      if (in) eligible.push_back(c);
    }

    if (cfg_.mode == NmflMode::DeterministicGreedy) {
      assign_greedy(step, eligible);
    } else {
      assign_randomized(step, client, eligible, changed);
    }

    conn_paid_ += step.connection_cost;
    assignments_[client] = step.facility;
    trace_.push_back(step);

    if (cfg_.preprocess) {
      bool doubled = false;
      while (frac_.lp_cost() > cfg_.opt_guess || step.connection_cost > cfg_.opt_guess) {
        cfg_.opt_guess *= 2;
        doubled = true;
        ++guess_rebuilds_;
      }
      trace_.back().opt_guess_doubled = doubled;
    }
    return trace_.back();
  }

  const FractionalState& fractional() const { return frac_; }
  const std::set<int>& opened() const { return opened_; }
  const std::map<int, int>& assignments() const { return assignments_; }
  const std::vector<NmflStep>& trace() const { return trace_; }
  Rat facility_paid() const { return fac_paid_; }
  Rat connection_paid() const { return conn_paid_; }
  Rat total_paid() const { return fac_paid_ + conn_paid_; }
  long fallback_count() const { return fallback_count_; }
  long guess_rebuilds() const { return guess_rebuilds_; }
  const ScRounder& rounder() const { return rounder_; }

  // Fractional connection cost sum conn(c,f) * x_conn(c,f) over pairs whose
  // connection cost this run has seen.
  Rat fractional_conn_cost() const {
    Rat s(0);
    for (const auto& [key, x] : frac_.conn_values()) {
      auto it = conn_cost_of_.find(key);
      if (it != conn_cost_of_.end()) s += it->second * x;
    }
    return s;
  }

 private:
  // Guess-managed grid, in raw units. The grid floor is the power of two at
  // or above opt_guess/k so rounded connection costs stay exact powers of
  // two; the level thresholds then line up with the cost grid.
  std::vector<FacCandidate> apply_preprocessing(const std::vector<FacCandidate>& raw) {
    std::vector<FacCandidate> out;
    Rat hi = cfg_.opt_guess * rat(cfg_.k);
    Rat lo = cfg_.opt_guess / rat(cfg_.k);
    Rat floor = lo > 0 ? ceil_pow2(lo) : Rat(1);
    for (const auto& c : raw) {
      if (c.open_cost > hi) continue;
      if (c.conn_cost > hi) continue;
      Rat conn = c.conn_cost < floor ? Rat(0) : ceil_pow2(c.conn_cost);
      out.push_back({c.facility, c.open_cost, conn});
    }
    return out;
  }

  void assign_greedy(NmflStep& step, const std::vector<FacCandidate>& eligible) {
    const FacCandidate* best = nullptr;
    for (const auto& c : eligible) {
      if (opened_.count(c.facility)) {
        if (!best || c.conn_cost < best->conn_cost ||
            (c.conn_cost == best->conn_cost && c.facility < best->facility))
          best = &c;
      }
    }
    if (!best) {
      for (const auto& c : eligible)
        if (!best || c.open_cost < best->open_cost ||
            (c.open_cost == best->open_cost && c.facility < best->facility))
          best = &c;
      step.fallback = true;
      ++fallback_count_;
      open_facility(best->facility, best->open_cost, step);
    }
    step.facility = best->facility;
    step.connection_cost = best->conn_cost;
  }

  void assign_randomized(NmflStep& step, int client, const std::vector<FacCandidate>& eligible,
                         const std::vector<int>& changed) {
    std::vector<RoundingCandidate> cands;
    cands.reserve(eligible.size());
    for (const auto& c : eligible) cands.push_back({c.facility, to_double(c.open_cost)});

    std::vector<FracUpdate> updates;
    std::set<int> touched(changed.begin(), changed.end());
    for (const auto& c : eligible) touched.insert(c.facility);
    for (int f : touched) {
      double x2 = std::min(1.0, 2.0 * to_double(frac_.x_fac(f)));
      updates.push_back({f, x2, open_cost_hint(f)});
    }

    int element = client * kLevelStride +
                  static_cast<int>(step.level.zero_mass ? 0 : step.level.level + 1);
    RoundingStep rs = rounder_.arrive(element, cands, updates);
    step.fallback = rs.fallback;
    if (rs.fallback) ++fallback_count_;
    for (int f : rs.purchased) {
      if (opened_.insert(f).second) {
        auto it = open_cost_exact_.find(f);
        if (it == open_cost_exact_.end()) throw ContractError("nmfl: unknown facility purchased");
        fac_paid_ += it->second;
        step.facility_cost_step += it->second;
      }
    }
    // Greedy connection: cheapest opened candidate by connection cost, then
    // by opening cost, then by id.
    const FacCandidate* best = nullptr;
    auto better = [](const FacCandidate& a, const FacCandidate& b) {
      if (a.conn_cost != b.conn_cost) return a.conn_cost < b.conn_cost;
      if (a.open_cost != b.open_cost) return a.open_cost < b.open_cost;
      return a.facility < b.facility;
    };
    for (const auto& c : eligible) {
      if (!opened_.count(c.facility)) continue;
      if (!best || better(c, *best)) best = &c;
    }
    if (!best) throw ContractError("nmfl: element uncovered after rounding");
    step.facility = best->facility;
    step.connection_cost = best->conn_cost;
  }

  void open_facility(int f, const Rat& cost, NmflStep& step) {
    if (opened_.insert(f).second) {
      fac_paid_ += cost;
      step.facility_cost_step += cost;
    }
  }

  double open_cost_hint(int f) {
    auto it = open_cost_exact_.find(f);
    return it == open_cost_exact_.end() ? 0.0 : to_double(it->second);
  }

  NmflConfig cfg_;
  FractionalState frac_;
  ScRounder rounder_;
  std::set<int> opened_;
  std::map<int, int> assignments_;
  std::map<std::pair<int, int>, Rat> conn_cost_of_;
  std::map<int, Rat> open_cost_exact_;
  std::vector<NmflStep> trace_;
  Rat fac_paid_, conn_paid_;
  long fallback_count_ = 0;
  long guess_rebuilds_ = 0;
};

}  // namespace nwsf
