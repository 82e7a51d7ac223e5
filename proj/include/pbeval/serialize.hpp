#pragma once

// JSON forms of allocations and MES ledgers. Keys keep insertion order and
// amounts are exact strings ("1250", "10/3").

#include "pbeval/mes.hpp"
#include "pbeval/rules.hpp"

#include <json.hpp>

namespace pbeval {

using Json = nlohmann::ordered_json;

inline Json to_json(const Allocation& allocation) {
  Json j;
  j["selected"] = Json::array();
  for (const auto& id : allocation.selected()) j["selected"].push_back(id);
  j["winners"] = allocation.size();
  j["total_cost"] = allocation.total_cost().str();
  return j;
}

inline Json to_json(const MesLedger& ledger) {
  Json j;
  j["initial_share"] = ledger.initial_share.str();
  j["selection_order"] = ledger.selection_order;
  Json purchases = Json::array();
  for (const auto& pid : ledger.selection_order) {
    Json p;
    p["project"] = pid;
    p["alpha"] = format_rational(ledger.affordabilities.at(pid));
    Json pays = Json::object();
    for (const auto& [voter, amount] : ledger.payments.at(pid)) pays[voter] = amount.str();
    p["payments"] = std::move(pays);
    purchases.push_back(std::move(p));
  }
  j["purchases"] = std::move(purchases);
  Json budgets = Json::object();
  for (const auto& voter : ledger.voters) budgets[voter] = ledger.budgets.at(voter).str();
  j["final_budgets"] = std::move(budgets);
  return j;
}

inline Json to_json(const RuleOutcome& outcome, const RuleSpec& spec, const Instance& instance) {
  Json j;
  j["instance_id"] = instance.id();
  j["rule"] = spec.name();
  j["budget_limit"] = instance.budget_limit().str();
  j["allocation"] = to_json(outcome.allocation);
  j["complete"] = is_complete(outcome.allocation, instance);
  if (outcome.star) {
    Json s;
    s["round"] = outcome.star->round;
    s["budget_used"] = outcome.star->budget_used.str();
    s["terminated"] = outcome.star->terminated;
    j["star_completion"] = std::move(s);
  }
  if (outcome.ledger) j["ledger"] = to_json(*outcome.ledger);
  return j;
}

}  // namespace pbeval
