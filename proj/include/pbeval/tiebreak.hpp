#pragma once

#include "pbeval/model.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace pbeval {

enum class TieCriterion { kLowerCost, kHigherCost, kLowerId, kHigherId, kInputOrder };

/// Secondary ordering applied after a rule's own score (approval count for
/// GreedCost, affordability for MES). Lexicographic id is always the final
/// fallback, so the order is total.
struct TieBreak {
  std::vector<TieCriterion> criteria{TieCriterion::kLowerCost, TieCriterion::kLowerId};

  /// -1 if `a` is preferred, 1 if `b` is, 0 only for the same project.
  int compare(const Instance& instance, std::size_t a, std::size_t b) const {
    if (a == b) return 0;
    const Project& pa = instance.project(a);
    const Project& pb = instance.project(b);
    for (TieCriterion c : criteria) {
      int r = 0;
      switch (c) {
        case TieCriterion::kLowerCost: r = cmp(pa.cost.value(), pb.cost.value()); break;
        case TieCriterion::kHigherCost: r = -cmp(pa.cost.value(), pb.cost.value()); break;
        case TieCriterion::kLowerId: r = pa.id.compare(pb.id); break;
        case TieCriterion::kHigherId: r = -pa.id.compare(pb.id); break;
        case TieCriterion::kInputOrder: r = a < b ? -1 : 1; break;
      }
      if (r != 0) return r < 0 ? -1 : 1;
    }
    return pa.id < pb.id ? -1 : 1;
  }

  bool prefers(const Instance& instance, std::size_t a, std::size_t b) const {
    return compare(instance, a, b) < 0;
  }

  /// Parses a comma-separated list such as "cost,id" or "-cost,input".
  static TieBreak parse(const std::string& text) {
    TieBreak tb;
    tb.criteria.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "cost") tb.criteria.push_back(TieCriterion::kLowerCost);
      else if (item == "-cost") tb.criteria.push_back(TieCriterion::kHigherCost);
      else if (item == "id") tb.criteria.push_back(TieCriterion::kLowerId);
      else if (item == "-id") tb.criteria.push_back(TieCriterion::kHigherId);
      else if (item == "input") tb.criteria.push_back(TieCriterion::kInputOrder);
      else throw std::invalid_argument("unknown tie-break criterion '" + item + "'");
    }
    return tb;
  }
};

}  // namespace pbeval
