#pragma once

#include "pbeval/completion.hpp"
#include "pbeval/greedy.hpp"
#include "pbeval/mes.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace pbeval {

enum class RuleVariant { kGreedCost, kMes, kMesPlus, kMesStarPlus };

inline std::string rule_name(RuleVariant v) {
  switch (v) {
    case RuleVariant::kGreedCost: return "greedcost";
    case RuleVariant::kMes: return "mes";
    case RuleVariant::kMesPlus: return "mes+";
    case RuleVariant::kMesStarPlus: return "mes*+";
  }
  return "?";
}

inline std::optional<RuleVariant> parse_rule_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "greedcost" || name == "greedy") return RuleVariant::kGreedCost;
  if (name == "mes") return RuleVariant::kMes;
  if (name == "mes+") return RuleVariant::kMesPlus;
  if (name == "mes*+") return RuleVariant::kMesStarPlus;
  return std::nullopt;
}

struct RuleSpec {
  RuleVariant variant = RuleVariant::kGreedCost;
  /// Budget increment per round of the star completion. Unset: one cent per voter.
  std::optional<Money> epsilon;
  TieBreak tiebreak;
  std::size_t max_iterations = 10000;

  std::string name() const { return rule_name(variant); }

  Money effective_epsilon(std::size_t voters) const {
    if (epsilon) {
      if (epsilon->is_zero()) throw std::invalid_argument("epsilon must be positive");
      return *epsilon;
    }
    return Money::cents(static_cast<long>(std::max<std::size_t>(voters, 1)));
  }
};

struct RuleOutcome {
  Allocation allocation;
  std::optional<MesLedger> ledger;          // MES-based variants
  std::optional<StarCompletion> star;       // mes*+ only
};

inline RuleOutcome run_rule(const RuleSpec& spec, const Instance& instance, const Profile& profile) {
  IndexedProfile indexed(instance, profile);
  const TieBreak& tb = spec.tiebreak;
  RuleFn greedy = [&tb](const Instance& inst, const Profile& prof) {
    return greed_cost(inst, prof, tb);
  };

  RuleOutcome out;
  switch (spec.variant) {
    case RuleVariant::kGreedCost:
      out.allocation = greed_cost(instance, indexed.approval_counts, tb);
      return out;
    case RuleVariant::kMes:
    case RuleVariant::kMesPlus: {
      auto [allocation, ledger] = mes(instance, profile, tb);
      out.allocation = spec.variant == RuleVariant::kMes
                           ? allocation
                           : complete_with_secondary(allocation, instance, profile, greedy);
      out.ledger = std::move(ledger);
      return out;
    }
    case RuleVariant::kMesStarPlus: {
      detail::MesEngine engine(instance, indexed);
      RuleFn raised_mes = [&](const Instance& inst, const Profile&) {
        return mes_allocation(inst, engine, tb);
      };
      StarCompletion star = complete_star(raised_mes, instance, profile,
                                          spec.effective_epsilon(profile.size()),
                                          spec.max_iterations);
      out.allocation = complete_with_secondary(star.allocation, instance, profile, greedy);
      out.ledger = mes(instance.with_budget(star.budget_used), profile, tb).second;
      out.star = std::move(star);
      return out;
    }
  }
  return out;
}

}  // namespace pbeval
