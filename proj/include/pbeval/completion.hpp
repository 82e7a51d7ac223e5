#pragma once

#include "pbeval/model.hpp"

#include <functional>
#include <optional>

namespace pbeval {

using RuleFn = std::function<Allocation(const Instance&, const Profile&)>;

/// Extends `base` by running `secondary` on what is left: the unselected
/// projects, ballots restricted to them, and the unspent budget.
inline Allocation complete_with_secondary(const Allocation& base, const Instance& instance,
                                          const Profile& profile, const RuleFn& secondary) {
  auto rest = instance.without(base.selected(), leftover(base, instance));
  if (!rest) return base;
  const Allocation extra = secondary(*rest, profile.without(base.selected()));
  ProjectIds all = base.selected();
  all.insert(extra.selected().begin(), extra.selected().end());
  return Allocation(instance, std::move(all));
}

struct StarCompletion {
  Allocation allocation;
  std::size_t round = 0;     // round whose output was returned
  Money budget_used;         // budget the rule was run with in that round
  bool terminated = false;   // false: max_iterations ran out first
};

/// Reruns `rule` with budgets b, b+eps, b+2eps, ... . Stops at the first round
/// whose output is complete and feasible for b, or returns the previous
/// round's output once an output overshoots b.
inline StarCompletion complete_star(const RuleFn& rule, const Instance& instance,
                                    const Profile& profile, const Money& epsilon,
                                    std::size_t max_iterations = 10000) {
  if (epsilon.is_zero()) throw std::invalid_argument("budget increment must be positive");
  const Money& limit = instance.budget_limit();
  StarCompletion last{Allocation(instance, {}), 0, limit, false};
  Money budget = limit;
  for (std::size_t round = 0; round < max_iterations; ++round, budget += epsilon) {
    const Allocation raised = round == 0 ? rule(instance, profile)
                                         : rule(instance.with_budget(budget), profile);
    if (raised.total_cost() > limit) {
      last.terminated = true;
      return last;
    }
    Allocation at_limit(instance, raised.selected());
    if (is_complete(at_limit, instance)) {
      return StarCompletion{std::move(at_limit), round, budget, true};
    }
    last = StarCompletion{std::move(at_limit), round, budget, false};
  }
  return last;
}

}  // namespace pbeval
