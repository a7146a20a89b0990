#pragma once

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nwsf/util.hpp"

namespace nwsf {

// Minimum of p independent U[0,1] draws from the given stream.
inline double sample_min_uniform(Rng& rng, int p) {
  if (p < 1) throw InputError("sample_min_uniform: p must be >= 1");
  double y = 1.0;
  for (int i = 0; i < p; ++i) y = std::min(y, rng.next_unit());
  return y;
}

struct RoundingCandidate {
  int set = -1;
  double cost = 0.0;
};

struct FracUpdate {
  int set = -1;
  double x = 0.0;
  double cost = 0.0;
};

struct RoundingConfig {
  int p = 0;              // explicit threshold multiplicity; 0 derives it below
  double p_factor = 2.0;  // p = ceil(p_factor * log2(element_guess))
  long element_guess = 0; // declared or guessed super-instance size |X|
  bool budget_doubling = false;
  bool p_doubling = false;  // start at p=1, double on every fallback
  uint64_t seed = 1;
};

struct RoundingStep {
  std::vector<int> purchased;  // sets newly bought this arrival
  double step_cost = 0.0;
  bool fallback = false;
  int fallback_set = -1;
  bool budget_restart = false;
  bool p_restart = false;
};

// Online rounding of a monotone fractional set-cover solution. Each set gets
// a lazily sampled threshold Y_S = min of p uniforms (fresh per epoch); a set
// is bought as soon as its fractional value reaches its threshold. If the
// arriving element is still uncovered, the cheapest candidate is bought.
// Purchases are irrevocable and survive every restart.
class ScRounder {
 public:
  explicit ScRounder(RoundingConfig cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg_.p_doubling)
      p_ = 1;
    else if (cfg_.p > 0)
      p_ = cfg_.p;
    else {
      long guess = std::max<long>(2, cfg_.element_guess);
      p_ = std::max(1, static_cast<int>(std::ceil(cfg_.p_factor * std::log2(static_cast<double>(guess)))));
    }
  }

  RoundingStep arrive(int element, const std::vector<RoundingCandidate>& candidates,
                      const std::vector<FracUpdate>& updates) {
    (void)element;
    if (candidates.empty()) throw InfeasibleError("element with no candidate set");
    RoundingStep out;

    for (const auto& u : updates) {
      auto it = x_.find(u.set);
      double old = it == x_.end() ? 0.0 : it->second;
      if (u.x < old) throw ContractError("rounding input not monotone");
      lp_cost_ += u.cost * (u.x - old);
      x_[u.set] = u.x;
      cost_of_[u.set] = u.cost;
    }
    for (const auto& c : candidates)
      if (!cost_of_.count(c.set)) cost_of_[c.set] = c.cost;

    if (cfg_.budget_doubling) {
      if (ladder_.empty()) {
        budget_ = 2.0 * lp_cost_;
        ladder_.push_back(budget_);
      } else if (lp_cost_ > budget_) {
        resample_thresholds();
        budget_ = 2.0 * lp_cost_;
        ladder_.push_back(budget_);
        out.budget_restart = true;
      }
    }

    auto try_buy = [&](int set, double x) {
      if (purchased_.count(set)) return;
      if (x >= threshold(set)) {
        purchased_.insert(set);
        double c = cost_of_[set];
        total_cost_ += c;
        out.step_cost += c;
        out.purchased.push_back(set);
      }
    };
    // After a restart every known set must be re-checked against the fresh
    // thresholds; otherwise only changed values can newly cross.
    if (needs_resweep_) {
      needs_resweep_ = false;
      for (const auto& [set, x] : x_) try_buy(set, x);
    } else {
      for (const auto& u : updates) try_buy(u.set, u.x);
    }

    bool covered = false;
    for (const auto& c : candidates)
      if (purchased_.count(c.set)) {
        covered = true;
        break;
      }
    if (!covered) {
      const RoundingCandidate* cheapest = &candidates[0];
      for (const auto& c : candidates)
        if (c.cost < cheapest->cost || (c.cost == cheapest->cost && c.set < cheapest->set))
          cheapest = &c;
      purchased_.insert(cheapest->set);
      total_cost_ += cheapest->cost;
      out.step_cost += cheapest->cost;
      out.purchased.push_back(cheapest->set);
      out.fallback = true;
      out.fallback_set = cheapest->set;
      ++fallback_count_;
      if (cfg_.p_doubling) {
        p_ *= 2;
        resample_thresholds();
        out.p_restart = true;
      }
    }
    std::sort(out.purchased.begin(), out.purchased.end());
    return out;
  }

  bool is_purchased(int set) const { return purchased_.count(set) != 0; }
  const std::unordered_set<int>& purchased() const { return purchased_; }
  double total_cost() const { return total_cost_; }
  double lp_cost() const { return lp_cost_; }
  long fallback_count() const { return fallback_count_; }
  int p() const { return p_; }
  int epoch() const { return epoch_; }
  const std::vector<double>& budget_ladder() const { return ladder_; }

 private:
  double threshold(int set) {
    auto it = thresholds_.find(set);
    if (it != thresholds_.end()) return it->second;
    // Fresh substream per (epoch, set): the draw is independent of the order
    // in which sets are first seen.
    Rng sub = rng_.substream((static_cast<uint64_t>(epoch_) << 32) ^
                             static_cast<uint64_t>(static_cast<uint32_t>(set)));
    double y = sample_min_uniform(sub, p_);
    thresholds_[set] = y;
    return y;
  }

  void resample_thresholds() {
    thresholds_.clear();
    ++epoch_;
    needs_resweep_ = true;
  }

  RoundingConfig cfg_;
  Rng rng_;
  int p_ = 1;
  int epoch_ = 0;
  bool needs_resweep_ = false;
  double budget_ = -1.0;
  double lp_cost_ = 0.0;
  double total_cost_ = 0.0;
  long fallback_count_ = 0;
  std::vector<double> ladder_;
  std::unordered_map<int, double> x_, thresholds_, cost_of_;
  std::unordered_set<int> purchased_;
};

// The flawed baseline: one global threshold mu = min of 2*ceil(log2 guess)
// uniforms shared by every set. Kept only to demonstrate how it fails.
class SingleThresholdRounder {
 public:
  SingleThresholdRounder(long element_guess, uint64_t seed) : rng_(seed) {
    int draws = std::max(1, 2 * static_cast<int>(std::ceil(std::log2(
                                  static_cast<double>(std::max<long>(2, element_guess))))));
    mu_ = sample_min_uniform(rng_, draws);
  }

  RoundingStep arrive(int element, const std::vector<RoundingCandidate>& candidates,
                      const std::vector<FracUpdate>& updates) {
    (void)element;
    if (candidates.empty()) throw InfeasibleError("element with no candidate set");
    RoundingStep out;
    for (const auto& u : updates) {
      auto it = x_.find(u.set);
      double old = it == x_.end() ? 0.0 : it->second;
      if (u.x < old) throw ContractError("rounding input not monotone");
      x_[u.set] = u.x;
      cost_of_[u.set] = u.cost;
      if (!purchased_.count(u.set) && u.x >= mu_) {
        purchased_.insert(u.set);
        total_cost_ += u.cost;
        out.step_cost += u.cost;
        out.purchased.push_back(u.set);
      }
    }
    for (const auto& c : candidates)
      if (!cost_of_.count(c.set)) cost_of_[c.set] = c.cost;

    bool covered = false;
    for (const auto& c : candidates)
      if (purchased_.count(c.set)) {
        covered = true;
        break;
      }
    if (!covered) {
      const RoundingCandidate* cheapest = &candidates[0];
      for (const auto& c : candidates)
        if (c.cost < cheapest->cost || (c.cost == cheapest->cost && c.set < cheapest->set))
          cheapest = &c;
      purchased_.insert(cheapest->set);
      total_cost_ += cheapest->cost;
      out.step_cost += cheapest->cost;
      out.purchased.push_back(cheapest->set);
      out.fallback = true;
      out.fallback_set = cheapest->set;
      ++fallback_count_;
    }
    return out;
  }

  double mu() const { return mu_; }
  double total_cost() const { return total_cost_; }
  long fallback_count() const { return fallback_count_; }
  bool is_purchased(int set) const { return purchased_.count(set) != 0; }

 private:
  Rng rng_;
  double mu_ = 1.0;
  double total_cost_ = 0.0;
  long fallback_count_ = 0;
  std::unordered_map<int, double> x_, cost_of_;
  std::unordered_set<int> purchased_;
};

}  // namespace nwsf
