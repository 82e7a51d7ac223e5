#pragma once

// Method of Equal Shares for cost satisfaction.

#include "pbeval/model.hpp"
#include "pbeval/tiebreak.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pbeval {

/// Budget state and purchase records of one MES run.
struct MesLedger {
  Money initial_share;                // b / n for every voter
  std::vector<std::string> voters;    // profile order
  std::map<std::string, Money> budgets;  // final virtual budgets
  /// project id -> (approver id -> contribution); every approver is listed.
  std::map<std::string, std::map<std::string, Money>> payments;
  std::map<std::string, Rational> affordabilities;
  std::vector<std::string> selection_order;

  bool empty() const { return selection_order.empty(); }
};

struct Affordability {
  Rational alpha;
  std::map<std::string, Money> contributions;
};

namespace detail {

/// Smallest payment cap `level` with sum_i w_i * min(b_i, level) == cost, or
/// nullopt when the approvers cannot afford `cost`. `for_each` must visit
/// (budget, weight) pairs in ascending budget order and stop when the visitor
/// returns true. The cap is the largest single contribution.
template <class ForEach>
std::optional<Rational> water_level(const Rational& cost, std::uint64_t total_weight,
                                    ForEach&& for_each) {
  if (total_weight == 0) return std::nullopt;
  Rational remaining = cost;
  std::uint64_t rich = total_weight;
  std::optional<Rational> level;
  Rational scratch;
  for_each([&](const Rational& budget, std::uint64_t weight) {
    scratch = budget * rich;
    if (cmp(scratch, remaining) >= 0) {
      level = remaining / rich;
      return true;
    }
    scratch = budget * weight;
    remaining -= scratch;
    rich -= weight;
    return rich == 0;
  });
  return level;
}

/// Voters with identical ballots. They always hold identical budgets.
struct VoterTypes {
  std::vector<std::vector<std::uint32_t>> ballots;
  std::vector<std::uint32_t> weight;
  std::vector<std::vector<std::uint32_t>> members;  // voter indices

  explicit VoterTypes(const IndexedProfile& profile) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> seen;
    for (std::uint32_t v = 0; v < profile.ballots.size(); ++v) {
      auto [it, inserted] = seen.emplace(profile.ballots[v], static_cast<std::uint32_t>(ballots.size()));
      if (inserted) {
        ballots.push_back(profile.ballots[v]);
        weight.push_back(0);
        members.emplace_back();
      }
      ++weight[it->second];
      members[it->second].push_back(v);
    }
  }
  std::size_t size() const { return ballots.size(); }
  bool approves(std::uint32_t type, std::uint32_t project) const {
    return std::binary_search(ballots[type].begin(), ballots[type].end(), project);
  }
};

struct MesStep {
  std::uint32_t project;
  Rational alpha;
  std::vector<std::pair<std::uint32_t, Rational>> type_payments;  // filled when recording
};

struct MesRun {
  std::vector<MesStep> steps;
  std::vector<Rational> type_budgets;  // final, filled when recording
  Rational initial_share;
};

/// Runs MES at an arbitrary budget on a prepared profile. Voters that approve
/// the same selected projects are kept in one budget class. Budgets and costs
/// are integer numerators over one shared denominator, which grows whenever
/// a payment level needs a finer unit.
class MesEngine {
 public:
  MesEngine(const Instance& instance, const IndexedProfile& profile)
      : instance_(instance), types_(profile), approval_counts_(profile.approval_counts),
        voter_count_(profile.ballots.size()) {}

  const VoterTypes& types() const { return types_; }

  MesRun run(const Money& budget, const TieBreak& tiebreak, bool record) const {
    MesRun out;
    if (voter_count_ == 0) return out;
    const std::size_t m = instance_.size();
    out.initial_share = budget.value() / static_cast<unsigned long>(voter_count_);
    if (sgn(out.initial_share) == 0) return out;

    State st;
    st.unit = out.initial_share.get_den();
    for (std::size_t p = 0; p < m; ++p) {
      const mpz_class& d = instance_.project(p).cost.value().get_den();
      mpz_lcm(st.unit.get_mpz_t(), st.unit.get_mpz_t(), d.get_mpz_t());
    }
    st.cost.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
      const Rational& c = instance_.project(p).cost.value();
      st.cost[p] = c.get_num() * (st.unit / c.get_den());
    }
    st.classes.resize(1);
    st.classes[0].budget = out.initial_share.get_num() * (st.unit / out.initial_share.get_den());
    st.classes[0].size = voter_count_;
    st.classes[0].types.resize(types_.size());
    std::iota(st.classes[0].types.begin(), st.classes[0].types.end(), 0u);
    st.classes[0].counts.assign(approval_counts_.begin(), approval_counts_.end());
    st.order = {0};
    st.live.assign(approval_counts_.begin(), approval_counts_.end());

    struct Candidate {
      Rational alpha;
      std::uint32_t project;
    };
    auto less = [&](const Candidate& a, const Candidate& b) {
      const int c = cmp(a.alpha, b.alpha);
      if (c != 0) return c < 0;
      return tiebreak.prefers(instance_, a.project, b.project);
    };
    std::set<Candidate, decltype(less)> queue(less);
    Level level;
    for (std::uint32_t p = 0; p < m; ++p) {
      if (evaluate(st, p, level)) queue.insert(Candidate{alpha(st, p, level), p});
    }

    while (!queue.empty()) {
      Candidate top = *queue.begin();
      queue.erase(queue.begin());
      if (!evaluate(st, top.project, level)) continue;  // budgets only shrink
      top.alpha = alpha(st, top.project, level);
      if (!queue.empty() && !less(top, *queue.begin())) {
        queue.insert(std::move(top));
        continue;
      }
      MesStep step{top.project, top.alpha, {}};
      buy(st, top.project, level, record ? &step : nullptr);
      out.steps.push_back(std::move(step));
    }

    if (record) {
      out.type_budgets.assign(types_.size(), Rational(0));
      for (const auto& cls : st.classes) {
        const Rational b = to_rational(cls.budget, st.unit);
        for (std::uint32_t t : cls.types) out.type_budgets[t] = b;
      }
    }
    return out;
  }

 private:
  struct BudgetClass {
    mpz_class budget;  // in units of 1/State::unit
    std::uint64_t size = 0;
    std::vector<std::uint32_t> types;
    std::vector<std::uint32_t> counts;  // approvers of each project in this class
  };

  struct State {
    mpz_class unit;
    std::vector<mpz_class> cost;
    std::vector<BudgetClass> classes;
    std::vector<std::uint32_t> order;  // classes with money left, ascending budget
    std::vector<std::uint64_t> live;   // approvers of each project with money left
    std::vector<std::uint32_t> kept, charged;  // scratch for buy()
  };

  /// Payment cap as remainder / rich, in budget units.
  struct Level {
    mpz_class remainder;
    std::uint64_t rich = 0;
  };

  static Rational to_rational(const mpz_class& numerator, const mpz_class& unit) {
    Rational r(numerator, unit);
    r.canonicalize();
    return r;
  }

  static Rational alpha(const State& st, std::uint32_t p, const Level& level) {
    Rational a(level.remainder, st.cost[p] * level.rich);
    a.canonicalize();
    return a;
  }

  /// Water-filling over the classes in ascending budget order.
  static bool evaluate(const State& st, std::uint32_t p, Level& level) {
    std::uint64_t rich = st.live[p];
    if (rich == 0) return false;
    mpz_class& remaining = level.remainder;
    remaining = st.cost[p];
    mpz_class scratch;
    for (std::uint32_t c : st.order) {
      const auto& cls = st.classes[c];
      const std::uint32_t w = cls.counts[p];
      if (w == 0) continue;
      mpz_mul_ui(scratch.get_mpz_t(), cls.budget.get_mpz_t(), rich);
      if (cmp(scratch, remaining) >= 0) {
        level.rich = rich;
        return true;
      }
      mpz_submul_ui(remaining.get_mpz_t(), cls.budget.get_mpz_t(), w);
      rich -= w;
      if (rich == 0) return false;
    }
    return false;
  }

  /// Refines the unit so that `level` is a whole number of units; returns it.
  static mpz_class settle(State& st, const Level& level) {
    mpz_class g;
    mpz_gcd_ui(g.get_mpz_t(), level.remainder.get_mpz_t(), level.rich);
    const unsigned long factor = level.rich / g.get_ui();
    if (factor != 1) {
      st.unit *= factor;
      for (auto& c : st.cost) c *= factor;
      for (std::uint32_t c : st.order) {
        mpz_mul_ui(st.classes[c].budget.get_mpz_t(), st.classes[c].budget.get_mpz_t(), factor);
      }
    }
    return level.remainder / g;
  }

  // Charges the approvers of p and keeps `order` sorted. Charged classes keep
  // their relative order, so they are merged back rather than re-sorted, and
  // classes that run out of money leave the order for good.
  void buy(State& st, std::uint32_t p, const Level& raw_level, MesStep* step) const {
    const mpz_class level = settle(st, raw_level);
    auto& classes = st.classes;
    auto& kept = st.kept;
    auto& charged = st.charged;
    kept.clear();
    charged.clear();
    for (std::uint32_t c : st.order) {
      const std::uint32_t w = classes[c].counts[p];
      if (w == 0) {
        kept.push_back(c);
        continue;
      }
      const bool drained = cmp(classes[c].budget, level) <= 0;
      std::optional<Rational> amount;
      if (step) amount = to_rational(drained ? classes[c].budget : level, st.unit);
      std::uint32_t target = c;
      if (w == classes[c].size) {
        if (drained) classes[c].budget = 0;
        else classes[c].budget -= level;
      } else {
        BudgetClass payers;
        if (!drained) payers.budget = classes[c].budget - level;
        payers.counts.assign(instance_.size(), 0);
        std::vector<std::uint32_t> rest;
        for (std::uint32_t t : classes[c].types) {
          if (types_.approves(t, p)) {
            payers.types.push_back(t);
            payers.size += types_.weight[t];
            for (std::uint32_t q : types_.ballots[t]) payers.counts[q] += types_.weight[t];
          } else {
            rest.push_back(t);
          }
        }
        BudgetClass& old = classes[c];
        old.types = std::move(rest);
        old.size -= payers.size;
        for (std::size_t q = 0; q < old.counts.size(); ++q) old.counts[q] -= payers.counts[q];
        kept.push_back(c);
        target = static_cast<std::uint32_t>(classes.size());
        classes.push_back(std::move(payers));
      }
      if (step) {
        for (std::uint32_t t : classes[target].types) step->type_payments.emplace_back(t, *amount);
      }
      if (sgn(classes[target].budget) == 0) {
        for (std::size_t q = 0; q < st.live.size(); ++q) st.live[q] -= classes[target].counts[q];
      } else {
        charged.push_back(target);
      }
    }
    st.order.clear();
    std::merge(kept.begin(), kept.end(), charged.begin(), charged.end(), std::back_inserter(st.order),
               [&](std::uint32_t a, std::uint32_t b) { return cmp(classes[a].budget, classes[b].budget) < 0; });
  }

  const Instance& instance_;
  VoterTypes types_;
  std::vector<std::uint32_t> approval_counts_;
  std::size_t voter_count_;
};

}  // namespace detail

/// Affordability of a project of cost `cost` for the given approvers, with the
/// contributions that realise it. Nullopt when the approvers cannot pay.
inline std::optional<Affordability> mes_affordability(const Money& cost,
                                                      const std::map<std::string, Money>& budgets,
                                                      const std::set<std::string>& approver_set) {
  std::vector<std::pair<const Rational*, const std::string*>> sorted;
  sorted.reserve(approver_set.size());
  for (const auto& id : approver_set) {
    auto it = budgets.find(id);
    if (it == budgets.end()) throw StructuralError("no budget for voter '" + id + "'");
    sorted.emplace_back(&it->second.value(), &id);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return cmp(*a.first, *b.first) < 0; });
  auto level = detail::water_level(cost.value(), sorted.size(), [&](auto&& visit) {
    for (const auto& [budget, id] : sorted) {
      if (visit(*budget, 1)) return;
    }
  });
  if (!level) return std::nullopt;
  Affordability out;
  out.alpha = *level / cost.value();
  for (const auto& [budget, id] : sorted) {
    out.contributions.emplace(*id, Money(cmp(*budget, *level) <= 0 ? *budget : *level));
  }
  return out;
}

/// MES on the instance's own budget. Returns the allocation and, when
/// `with_ledger` is set, the full per-voter ledger.
inline std::pair<Allocation, MesLedger> mes(const Instance& instance, const Profile& profile,
                                            const TieBreak& tiebreak = {}) {
  IndexedProfile indexed(instance, profile);
  detail::MesEngine engine(instance, indexed);
  detail::MesRun run = engine.run(instance.budget_limit(), tiebreak, true);

  MesLedger ledger;
  ProjectIds selected;
  ledger.voters.reserve(profile.size());
  for (const auto& b : profile.ballots()) ledger.voters.push_back(b.voter_id);
  if (profile.empty()) return {Allocation(instance, {}), std::move(ledger)};

  ledger.initial_share = Money(run.initial_share);
  const auto& types = engine.types();
  for (const auto& step : run.steps) {
    const std::string& pid = instance.project(step.project).id;
    selected.insert(pid);
    ledger.selection_order.push_back(pid);
    ledger.affordabilities.emplace(pid, step.alpha);
    auto& row = ledger.payments[pid];
    for (const auto& [t, pay] : step.type_payments) {
      for (std::uint32_t v : types.members[t]) row.emplace(ledger.voters[v], Money(pay));
    }
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    for (std::uint32_t v : types.members[t]) {
      ledger.budgets.emplace(ledger.voters[v], Money(run.type_budgets[t]));
    }
  }
  return {Allocation(instance, std::move(selected)), std::move(ledger)};
}

/// MES selection only, for callers that run many budgets on one profile.
inline Allocation mes_allocation(const Instance& instance, const detail::MesEngine& engine,
                                 const TieBreak& tiebreak = {}) {
  detail::MesRun run = engine.run(instance.budget_limit(), tiebreak, false);
  ProjectIds selected;
  for (const auto& step : run.steps) selected.insert(instance.project(step.project).id);
  return Allocation(instance, std::move(selected));
}

}  // namespace pbeval
