#pragma once

#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nwsf/rational.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

struct SetCoverInstance {
  std::vector<Rat> set_costs;
  std::vector<std::vector<int>> sets;  // element ids covered by each set

  int n_sets() const { return static_cast<int>(set_costs.size()); }

  int n_elements() const {
    int hi = -1;
    for (const auto& s : sets)
      for (int e : s) hi = std::max(hi, e);
    return hi + 1;
  }

  std::vector<int> covering_sets(int element) const {
    std::vector<int> out;
    for (int s = 0; s < n_sets(); ++s)
      for (int e : sets[static_cast<std::size_t>(s)])
        if (e == element) {
          out.push_back(s);
          break;
        }
    return out;
  }

  void validate() const {
    if (sets.size() != set_costs.size()) throw InputError("set cover: size mismatch");
    for (const Rat& c : set_costs)
      if (c < 0) throw InputError("set cover: negative cost");
  }

  // {"set_costs":[...], "sets":[[elem,...],...]}
  static SetCoverInstance from_json(const nlohmann::json& j) {
    SetCoverInstance inst;
    for (const auto& c : j.at("set_costs"))
      inst.set_costs.push_back(c.is_number_integer() ? rat(c.get<long>())
                                                     : rat_from_double(c.get<double>()));
    for (const auto& s : j.at("sets")) inst.sets.push_back(s.get<std::vector<int>>());
    inst.validate();
    return inst;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto cs = nlohmann::json::array();
    for (const Rat& c : set_costs) cs.push_back(to_double(c));
    j["set_costs"] = cs;
    j["sets"] = sets;
    return j;
  }
};

struct NmflInstance {
  std::vector<Rat> fac_costs;
  // conn[c] lists (facility, cost) with finite connection cost only.
  std::vector<std::vector<std::pair<int, Rat>>> conn;

  int n_facilities() const { return static_cast<int>(fac_costs.size()); }
  int n_clients() const { return static_cast<int>(conn.size()); }

  void validate() const {
    for (const Rat& c : fac_costs)
      if (c < 0) throw InputError("nmfl: negative facility cost");
    for (const auto& row : conn) {
      if (row.empty()) throw InputError("nmfl: client without finite connection");
      for (const auto& [f, c] : row) {
        if (f < 0 || f >= n_facilities()) throw InputError("nmfl: invalid facility id");
        if (c < 0) throw InputError("nmfl: negative connection cost");
      }
    }
  }

  // {"fac_costs":[...], "conn":[[client,fac,cost],...]}
  static NmflInstance from_json(const nlohmann::json& j) {
    NmflInstance inst;
    for (const auto& c : j.at("fac_costs"))
      inst.fac_costs.push_back(c.is_number_integer() ? rat(c.get<long>())
                                                     : rat_from_double(c.get<double>()));
    for (const auto& e : j.at("conn")) {
      int c = e.at(0).get<int>();
      int f = e.at(1).get<int>();
      Rat w = e.at(2).is_number_integer() ? rat(e.at(2).get<long>())
                                          : rat_from_double(e.at(2).get<double>());
      if (c < 0) throw InputError("nmfl: invalid client id");
      if (static_cast<int>(inst.conn.size()) <= c) inst.conn.resize(static_cast<std::size_t>(c) + 1);
      inst.conn[static_cast<std::size_t>(c)].emplace_back(f, w);
    }
    inst.validate();
    return inst;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    auto fc = nlohmann::json::array();
    for (const Rat& c : fac_costs) fc.push_back(to_double(c));
    j["fac_costs"] = fc;
    auto cn = nlohmann::json::array();
    for (int c = 0; c < n_clients(); ++c)
      for (const auto& [f, w] : conn[static_cast<std::size_t>(c)]) cn.push_back({c, f, to_double(w)});
    j["conn"] = cn;
    return j;
  }
};

// Monotone fractional solution shared by the set-cover and facility-location
// update rules. Every coordinate only ever increases.
class FractionalState {
 public:
  const Rat& x_set(int s) const { return lookup(xs_, s); }
  const Rat& x_fac(int f) const { return lookup(xf_, f); }

  const Rat& x_conn(int c, int f) const {
    auto it = xcf_.find({c, f});
    return it == xcf_.end() ? zero_ : it->second;
  }

  const Rat& lp_cost() const { return cost_; }

  Rat conn_cost_total() const { return conn_cost_; }
  Rat fac_cost_total() const { return fac_cost_; }

  // Mutators enforce monotonicity; cost bookkeeping is incremental and exact.
  void raise_set(int s, const Rat& v, const Rat& cost) {
    Rat& cur = xs_[s];
    if (v < cur) throw ContractError("fractional value decreased");
    cost_ += cost * (v - cur);
    cur = v;
  }

  void raise_fac(int f, const Rat& v, const Rat& cost) {
    Rat& cur = xf_[f];
    if (v < cur) throw ContractError("fractional value decreased");
    cost_ += cost * (v - cur);
    fac_cost_ += cost * (v - cur);
    cur = v;
  }

  void raise_conn(int c, int f, const Rat& v, const Rat& cost) {
    Rat& cur = xcf_[{c, f}];
    if (v < cur) throw ContractError("fractional value decreased");
    cost_ += cost * (v - cur);
    conn_cost_ += cost * (v - cur);
    cur = v;
  }

  const std::map<std::pair<int, int>, Rat>& conn_values() const { return xcf_; }
  const std::map<int, Rat>& fac_values() const { return xf_; }
  const std::map<int, Rat>& set_values() const { return xs_; }

 private:
  static const Rat& lookup(const std::map<int, Rat>& m, int k) {
    static const Rat zero(0);
    auto it = m.find(k);
    return it == m.end() ? zero : it->second;
  }

  std::map<int, Rat> xs_;
  std::map<int, Rat> xf_;
  std::map<std::pair<int, int>, Rat> xcf_;
  Rat cost_;
  Rat conn_cost_;
  Rat fac_cost_;
  Rat zero_;
};

struct SetCandidate {
  int set = -1;
  Rat cost;
};

struct FacCandidate {
  int facility = -1;
  Rat open_cost;
  Rat conn_cost;
};

inline constexpr long kMaxIncreaseRounds = 1 << 20;

// Multiplicative-increase update for an arriving set-cover element. After the
// call the covering constraint sum_{S in candidates} x_S >= 1 holds exactly.
// Returns the ids whose value changed.
inline std::vector<int> fsc_arrive(FractionalState& state, int /*element*/,
                                   const std::vector<SetCandidate>& candidates) {
  if (candidates.empty()) throw InfeasibleError("element with no candidate set");
  std::vector<int> changed;
  auto current_sum = [&] {
    Rat s(0);
    for (const auto& c : candidates) s += state.x_set(c.set);
    return s;
  };
  if (current_sum() >= 1) return changed;  // already satisfied

  const Rat one(1);
  for (const auto& c : candidates) {
    if (c.cost == 0 && state.x_set(c.set) < 1) {
      state.raise_set(c.set, one, c.cost);
      changed.push_back(c.set);
    }
  }
  if (candidates.size() == 1) {
    // A single candidate must carry the whole constraint.
    if (state.x_set(candidates[0].set) < 1) {
      state.raise_set(candidates[0].set, one, candidates[0].cost);
      changed.push_back(candidates[0].set);
    }
    return changed;
  }
  Rat d(static_cast<long>(candidates.size()));
  long rounds = 0;
  while (current_sum() < 1) {
    if (++rounds > kMaxIncreaseRounds) throw ContractError("fsc_arrive: update did not converge");
    for (const auto& c : candidates) {
      Rat x = state.x_set(c.set);
      if (x >= 1 || c.cost == 0) continue;
      Rat nx = x * (1 + 1 / c.cost) + 1 / (d * c.cost);
      if (nx > 1) nx = one;
      state.raise_set(c.set, nx, c.cost);
      changed.push_back(c.set);
    }
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

// Facility-location variant. Maintains sum_f x_conn(client, f) >= 1 and the
// coupling x_fac(f) >= x_conn(c, f) for every pair ever touched. The marginal
// cost of a candidate is its connection cost, plus its opening cost while the
// coupling constraint is tight (raising x_conn then drags x_fac along). A
// zero marginal in the non-tight case is shifted by eps.
// Returns facility ids whose x_fac changed.
inline std::vector<int> fnmfl_arrive(FractionalState& state, int client,
                                     const std::vector<FacCandidate>& candidates,
                                     const Rat& eps = pow2(-20)) {
  if (candidates.empty()) throw InfeasibleError("client with no candidate facility");
  std::vector<int> changed;
  auto current_sum = [&] {
    Rat s(0);
    for (const auto& c : candidates) s += state.x_conn(client, c.facility);
    return s;
  };
  if (current_sum() >= 1) return changed;

  const Rat one(1);
  auto lift = [&](int f, const Rat& open_cost) {
    const Rat& xc = state.x_conn(client, f);
    if (state.x_fac(f) < xc) {
      state.raise_fac(f, xc, open_cost);
      changed.push_back(f);
    }
  };

  if (candidates.size() == 1) {
    const auto& c = candidates[0];
    if (state.x_conn(client, c.facility) < 1)
      state.raise_conn(client, c.facility, one, c.conn_cost);
    lift(c.facility, c.open_cost);
    return changed;
  }

  Rat d(static_cast<long>(candidates.size()));
  long rounds = 0;
  while (current_sum() < 1) {
    if (++rounds > kMaxIncreaseRounds) throw ContractError("fnmfl_arrive: update did not converge");
    for (const auto& c : candidates) {
      Rat x = state.x_conn(client, c.facility);
      if (x >= 1) continue;
      bool tight = state.x_fac(c.facility) <= x;
      Rat m = c.conn_cost + (tight ? c.open_cost : Rat(0));
      Rat nx;
      if (m == 0) {
        nx = (c.conn_cost == 0 && c.open_cost == 0) ? one
                                                    : x * (1 + 1 / eps) + 1 / (d * eps);
      } else {
        nx = x * (1 + 1 / m) + 1 / (d * m);
      }
      if (nx > 1) nx = one;
      state.raise_conn(client, c.facility, nx, c.conn_cost);
      lift(c.facility, c.open_cost);
    }
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

}  // namespace nwsf
