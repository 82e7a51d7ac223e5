#pragma once

#include "pbeval/model.hpp"
#include "pbeval/tiebreak.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace pbeval {

/// Order in which GreedCost considers projects: descending approval count,
/// ties broken by `tiebreak`.
inline std::vector<std::size_t> greedy_order(const Instance& instance,
                                             const std::vector<std::uint32_t>& approval_counts,
                                             const TieBreak& tiebreak) {
  std::vector<std::size_t> order(instance.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (approval_counts[a] != approval_counts[b]) return approval_counts[a] > approval_counts[b];
    return tiebreak.prefers(instance, a, b);
  });
  return order;
}

/// Greedy cost welfare rule.
inline Allocation greed_cost(const Instance& instance, const std::vector<std::uint32_t>& approval_counts,
                             const TieBreak& tiebreak = {}) {
  ProjectIds selected;
  Money spent;
  for (std::size_t i : greedy_order(instance, approval_counts, tiebreak)) {
    const Project& p = instance.project(i);
    if (spent + p.cost <= instance.budget_limit()) {
      spent += p.cost;
      selected.insert(p.id);
    }
  }
  return Allocation(instance, std::move(selected));
}

inline Allocation greed_cost(const Instance& instance, const Profile& profile,
                             const TieBreak& tiebreak = {}) {
  IndexedProfile indexed(instance, profile);
  return greed_cost(instance, indexed.approval_counts, tiebreak);
}

}  // namespace pbeval
