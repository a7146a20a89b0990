#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nwsf/covering_lp.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

enum class AdversaryStrategy {
  Replay,            // fixed arrival order, ignores the algorithm
  UncoveredSeeking,  // prefers elements no purchased set covers yet
};

// Semi-adaptive element selection over a fixed set-cover super-instance:
// the universe is committed up front, each element arrives at most once, and
// only the choice of the next element may react to observed purchases.
class SemiAdaptiveScAdversary {
 public:
  SemiAdaptiveScAdversary(const SetCoverInstance& super_instance, int n_elements,
                          AdversaryStrategy strategy)
      : inst_(super_instance), strategy_(strategy) {
    for (int e = 0; e < n_elements; ++e) {
      remaining_.push_back(e);
      covers_.push_back(inst_.covering_sets(e));
      if (covers_.back().empty()) throw InfeasibleError("super-instance element uncoverable");
    }
  }

  // `purchased` answers whether a set id is currently bought.
  std::optional<int> next(const std::function<bool(int)>& purchased) {
    if (remaining_.empty()) return std::nullopt;
    std::size_t pick = 0;
    if (strategy_ == AdversaryStrategy::UncoveredSeeking) {
      bool found_uncovered = false;
      for (std::size_t i = 0; i < remaining_.size(); ++i) {
        bool covered = false;
        for (int s : covers_[static_cast<std::size_t>(remaining_[i])])
          if (purchased(s)) {
            covered = true;
            break;
          }
        if (!covered) {
          pick = i;
          found_uncovered = true;
          break;
        }
      }
      if (!found_uncovered) {
        // Everything left is covered: fall back to the element whose
        // cheapest covering set is cheapest.
        MaybeRat best;
        for (std::size_t i = 0; i < remaining_.size(); ++i) {
          MaybeRat cheapest;
          for (int s : covers_[static_cast<std::size_t>(remaining_[i])]) {
            const Rat& c = inst_.set_costs[static_cast<std::size_t>(s)];
            if (!cheapest || c < *cheapest) cheapest = c;
          }
          if (!best || *cheapest < *best) {
            best = cheapest;
            pick = i;
          }
        }
      }
    }
    int e = remaining_[pick];
    remaining_.erase(remaining_.begin() + static_cast<long>(pick));
    return e;
  }

  const std::vector<int>& covering_sets(int element) const {
    return covers_.at(static_cast<std::size_t>(element));
  }

  bool exhausted() const { return remaining_.empty(); }

 private:
  SetCoverInstance inst_;
  AdversaryStrategy strategy_;
  std::vector<int> remaining_;
  std::vector<std::vector<int>> covers_;
};

}  // namespace nwsf
