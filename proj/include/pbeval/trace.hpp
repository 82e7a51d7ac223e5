#pragma once

#include "pbeval/mes.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace pbeval {

namespace detail {

inline std::string plural(std::size_t k, const char* one, const char* many) {
  return std::to_string(k) + " " + (k == 1 ? one : many);
}

/// "v1, v2" for short lists, elided otherwise.
inline std::string voter_list(const std::vector<std::string>& ids, std::size_t max_listed = 8) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < max_listed; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > max_listed) out += ", ...";
  return out;
}

}  // namespace detail

/// Narrates a MES run as voters buying projects out of equal wallets.
inline std::string emit_trace(const MesLedger& ledger, const Instance& instance) {
  std::ostringstream os;
  const std::size_t n = ledger.voters.size();
  const Money budget = ledger.initial_share * static_cast<long>(n);
  os << "Each of " << detail::plural(n, "voter", "voters") << " receives an equal share "
     << budget.str() << "/" << n << " = " << ledger.initial_share.str() << ".\n";
  if (ledger.empty()) return os.str();

  std::size_t step = 0;
  for (const auto& pid : ledger.selection_order) {
    const Project& project = instance.project(pid);
    const auto& row = ledger.payments.at(pid);
    std::map<Money, std::vector<std::string>> by_amount;
    for (const auto& [voter, pay] : row) by_amount[pay].push_back(voter);

    os << "Step " << ++step << ": " << pid;
    if (!project.name.empty()) os << " \"" << project.name << "\"";
    os << " (cost " << project.cost.str() << ", " << detail::plural(row.size(), "approver", "approvers")
       << ") bought; ";
    if (by_amount.size() == 1) {
      os << "each pays " << by_amount.begin()->first.str();
    } else {
      bool first = true;
      for (auto it = by_amount.rbegin(); it != by_amount.rend(); ++it) {
        if (!first) os << ", ";
        first = false;
        os << detail::plural(it->second.size(), "voter pays ", "voters pay ") << it->first.str()
           << " [" << detail::voter_list(it->second) << "]";
      }
    }
    os << "; α=" << ledger.affordabilities.at(pid).get_str() << "\n";
  }

  std::map<Money, std::vector<std::string>> wallets;
  for (const auto& voter : ledger.voters) wallets[ledger.budgets.at(voter)].push_back(voter);
  os << "Final wallets:";
  for (const auto& [amount, voters] : wallets) {
    os << " " << amount.str() << " x " << voters.size() << " [" << detail::voter_list(voters) << "];";
  }
  os << "\n";
  return os.str();
}

}  // namespace pbeval
