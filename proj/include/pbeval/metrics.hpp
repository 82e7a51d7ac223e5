#pragma once

// Outcome measures for a single allocation: overlap, satisfaction
// distribution, share-based effort, happiness and category proportionality.

#include "pbeval/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pbeval {

using SatisfactionVector = std::vector<Rational>;

/// cost(W1 ∩ W2) / mean(cost(W1), cost(W2)); 1 when both are empty.
inline Rational similarity(const Allocation& w1, const Allocation& w2, const Instance& instance) {
  const Rational denom = (w1.total_cost().value() + w2.total_cost().value()) / 2;
  if (sgn(denom) == 0) return Rational(1);
  Money overlap;
  for (const auto& id : w1.selected()) {
    if (w2.contains(id)) overlap += instance.project(id).cost;
  }
  return Rational(overlap.value() / denom);
}

/// Cost of the selected projects each voter approves, in profile order.
inline std::vector<Money> approved_selected_cost(const Profile& profile, const Allocation& allocation,
                                                 const Instance& instance) {
  std::vector<Money> out;
  out.reserve(profile.size());
  for (const auto& b : profile.ballots()) {
    Money sum;
    for (const auto& id : b.approved) {
      if (allocation.contains(id)) sum += instance.project(id).cost;
    }
    out.push_back(std::move(sum));
  }
  return out;
}

/// Per-voter cost satisfaction normalised by the budget limit.
inline SatisfactionVector cost_satisfaction(const Profile& profile, const Allocation& allocation,
                                            const Instance& instance) {
  SatisfactionVector out;
  out.reserve(profile.size());
  for (auto& m : approved_selected_cost(profile, allocation, instance)) {
    out.push_back(Rational(m.value() / instance.budget_limit().value()));
  }
  return out;
}

/// Per-voter share: each selected project's cost split equally over all of
/// its approvers. Projects nobody approves contribute nothing.
inline std::vector<Money> effort(const Profile& profile, const Allocation& allocation,
                                 const Instance& instance) {
  std::map<std::string, long> counts;
  for (const auto& id : allocation.selected()) counts[id] = 0;
  for (const auto& b : profile.ballots()) {
    for (const auto& id : b.approved) {
      auto it = counts.find(id);
      if (it != counts.end()) ++it->second;
    }
  }
  std::map<std::string, Money> share;
  for (const auto& [id, k] : counts) {
    if (k > 0) share.emplace(id, instance.project(id).cost / k);
  }
  std::vector<Money> out;
  out.reserve(profile.size());
  for (const auto& b : profile.ballots()) {
    Money sum;
    for (const auto& id : b.approved) {
      auto it = share.find(id);
      if (it != share.end()) sum += it->second;
    }
    out.push_back(std::move(sum));
  }
  return out;
}

inline Rational mean(std::span<const Rational> values) {
  if (values.empty()) return Rational(0);
  Rational sum = 0;
  for (const auto& v : values) sum += v;
  return Rational(sum / static_cast<unsigned long>(values.size()));
}

/// Gini coefficient sum_ij |x_i - x_j| / (2 n^2 mean), evaluated in sorted
/// form. Zero for an all-zero or empty vector.
inline Rational gini(std::span<const Rational> values) {
  const std::size_t n = values.size();
  if (n == 0) return Rational(0);
  std::vector<const Rational*> sorted;
  sorted.reserve(n);
  Rational total = 0;
  for (const auto& v : values) {
    sorted.push_back(&v);
    total += v;
  }
  if (sgn(total) == 0) return Rational(0);
  std::sort(sorted.begin(), sorted.end(), [](const Rational* a, const Rational* b) { return cmp(*a, *b) < 0; });
  Rational weighted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long coefficient = 2 * static_cast<long>(i + 1) - static_cast<long>(n) - 1;
    if (coefficient != 0) weighted += *sorted[i] * coefficient;
  }
  return Rational(weighted / (total * static_cast<unsigned long>(n)));
}

inline Rational gini(const std::vector<Money>& values) {
  std::vector<Rational> r;
  r.reserve(values.size());
  for (const auto& m : values) r.push_back(m.value());
  return gini(std::span<const Rational>(r));
}

/// Fraction of voters with at least one approved project selected; 1 without voters.
inline Rational happiness(const Profile& profile, const Allocation& allocation) {
  if (profile.empty()) return Rational(1);
  unsigned long happy = 0;
  for (const auto& b : profile.ballots()) {
    for (const auto& id : b.approved) {
      if (allocation.contains(id)) {
        ++happy;
        break;
      }
    }
  }
  return Rational(happy) / static_cast<unsigned long>(profile.size());
}

inline Money ballot_cost(const ApprovalBallot& ballot, const Instance& instance) {
  Money sum;
  for (const auto& id : ballot.approved) sum += instance.project(id).cost;
  return sum;
}

inline std::size_t empty_ballot_count(const Profile& profile) {
  return static_cast<std::size_t>(std::count_if(profile.ballots().begin(), profile.ballots().end(),
                                                [](const auto& b) { return b.approved.empty(); }));
}

/// Mean over voters of the share of their ballot's cost that falls in the
/// category. Voters with empty ballots are left out.
inline Rational voter_category_share(const Profile& profile, const Instance& instance,
                                     const std::string& category) {
  Rational sum = 0;
  unsigned long counted = 0;
  for (const auto& b : profile.ballots()) {
    Money all, in_category;
    for (const auto& id : b.approved) {
      const Project& p = instance.project(id);
      all += p.cost;
      if (p.categories.count(category)) in_category += p.cost;
    }
    if (all.is_zero()) continue;
    sum += in_category / all;
    ++counted;
  }
  if (counted == 0) return Rational(0);
  return Rational(sum / counted);
}

/// Share of the allocation's cost spent in the category; nullopt when nothing is selected.
inline std::optional<Rational> rule_category_share(const Allocation& allocation, const Instance& instance,
                                                   const std::string& category) {
  if (allocation.empty()) return std::nullopt;
  Money in_category;
  for (const auto& id : allocation.selected()) {
    const Project& p = instance.project(id);
    if (p.categories.count(category)) in_category += p.cost;
  }
  return in_category / allocation.total_cost();
}

struct CategoryShare {
  std::string label;
  Rational voters;  // q(C)
  Rational rule;    // q_R(C)
};

struct CategoryReport {
  std::vector<CategoryShare> categories;
  Rational mean_squared_difference;
  double disproportionality = 0;  // root of the mean squared difference
  double proportionality = 1;     // exp(-disproportionality)
};

/// Nullopt when the instance has no categories or nothing is selected.
inline std::optional<CategoryReport> category_proportionality(const Profile& profile, const Instance& instance,
                                                              const Allocation& allocation) {
  const auto labels = instance.categories();
  if (labels.empty() || allocation.empty()) return std::nullopt;
  CategoryReport report;
  Rational sum_sq = 0;
  for (const auto& label : labels) {
    CategoryShare share{label, voter_category_share(profile, instance, label),
                        *rule_category_share(allocation, instance, label)};
    const Rational diff = share.voters - share.rule;
    sum_sq += diff * diff;
    report.categories.push_back(std::move(share));
  }
  report.mean_squared_difference = sum_sq / static_cast<unsigned long>(labels.size());
  report.disproportionality = std::sqrt(report.mean_squared_difference.get_d());
  report.proportionality = std::exp(-report.disproportionality);
  return report;
}

/// Average gain in category proportionality and in equality (one minus the
/// cost-satisfaction Gini) when moving from `greedy` to `mes`. Nullopt for
/// uncategorised instances.
inline std::optional<double> effect_score(const Instance& instance, const Profile& profile,
                                          const Allocation& greedy, const Allocation& mes) {
  auto prop_greedy = category_proportionality(profile, instance, greedy);
  auto prop_mes = category_proportionality(profile, instance, mes);
  if (!prop_greedy || !prop_mes) return std::nullopt;
  const Rational gini_greedy = gini(std::span<const Rational>(cost_satisfaction(profile, greedy, instance)));
  const Rational gini_mes = gini(std::span<const Rational>(cost_satisfaction(profile, mes, instance)));
  const double equality_gain = Rational(gini_greedy - gini_mes).get_d();
  return 0.5 * ((prop_mes->proportionality - prop_greedy->proportionality) + equality_gain);
}

/// Median cost of the selected projects; mean of the middle pair for even counts.
inline std::optional<Money> median_selected_cost(const Allocation& allocation, const Instance& instance) {
  if (allocation.empty()) return std::nullopt;
  std::vector<Money> costs;
  for (const auto& id : allocation.selected()) costs.push_back(instance.project(id).cost);
  std::sort(costs.begin(), costs.end());
  const std::size_t k = costs.size();
  if (k % 2 == 1) return costs[k / 2];
  return (costs[k / 2 - 1] + costs[k / 2]) / 2;
}

struct MetricOptions {
  /// Count voters with empty ballots in satisfaction, effort and happiness figures.
  bool include_empty_ballots = true;
};

/// Every per-instance figure the rule comparison reports.
struct RuleMetrics {
  Rational similarity;  // to the reference allocation
  std::size_t winners = 0;
  std::optional<Money> median_cost;
  std::optional<double> proportionality;
  Rational avg_satisfaction;
  Rational gini_cost;
  Rational gini_effort;
  Rational happiness;
};

inline RuleMetrics evaluate_metrics(const Instance& instance, const Profile& full_profile,
                                    const Allocation& allocation, const Allocation& reference,
                                    const MetricOptions& options = {}) {
  Profile filtered;
  const Profile* profile = &full_profile;
  if (!options.include_empty_ballots) {
    std::vector<ApprovalBallot> kept;
    for (const auto& b : full_profile.ballots()) {
      if (!b.approved.empty()) kept.push_back(b);
    }
    filtered = Profile(std::move(kept));
    profile = &filtered;
  }
  RuleMetrics m;
  m.similarity = similarity(allocation, reference, instance);
  m.winners = allocation.size();
  m.median_cost = median_selected_cost(allocation, instance);
  if (auto report = category_proportionality(full_profile, instance, allocation)) {
    m.proportionality = report->proportionality;
  }
  const auto sat = cost_satisfaction(*profile, allocation, instance);
  m.avg_satisfaction = mean(std::span<const Rational>(sat));
  m.gini_cost = gini(std::span<const Rational>(sat));
  m.gini_effort = gini(effort(*profile, allocation, instance));
  m.happiness = happiness(*profile, allocation);
  return m;
}

}  // namespace pbeval
