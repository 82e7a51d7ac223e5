#pragma once

// Property checks shared by the unit suites and the acceptance binary. Each
// returns an empty string on success and a description of the first failure
// otherwise.

#include "oracles.hpp"

#include <filesystem>
#include <sstream>

namespace checks {

using namespace pbeval;

/// Every purchase is paid in full by its approvers and every budget stays
/// non-negative and equals its share minus what it paid.
inline std::string ledger_conservation(const Instance& instance, const Profile& profile) {
  auto [allocation, ledger] = mes(instance, profile);
  std::map<std::string, Money> spent;
  for (const auto& pid : ledger.selection_order) {
    const auto& row = ledger.payments.at(pid);
    Money total;
    const auto who = approvers(pid, profile, instance);
    for (const auto& [voter, pay] : row) {
      if (!who.count(voter)) return "non-approver " + voter + " pays for " + pid;
      total += pay;
      spent[voter] += pay;
    }
    if (total != instance.project(pid).cost) {
      return "payments for " + pid + " sum to " + total.str() + ", cost " + instance.project(pid).cost.str();
    }
  }
  for (const auto& b : profile.ballots()) {
    const Money& left = ledger.budgets.at(b.voter_id);
    if (sgn(left.value()) < 0) return "negative budget for " + b.voter_id;
    if (left + spent[b.voter_id] != ledger.initial_share) {
      return "budget of " + b.voter_id + " does not balance";
    }
  }
  if (allocation.total_cost() > instance.budget_limit()) return "allocation over budget";
  return {};
}

/// Replays the ledger: at each step the bought project has the smallest
/// affordability among all affordable projects (ties by cost, then id), and
/// nothing affordable is left at the end.
inline std::string alpha_minimality(const Instance& instance, const Profile& profile) {
  auto [allocation, ledger] = mes(instance, profile);
  std::map<std::string, Money> budgets;
  for (const auto& b : profile.ballots()) budgets[b.voter_id] = ledger.initial_share;
  std::set<std::string> bought;
  auto best_now = [&]() -> std::optional<std::tuple<Rational, Money, std::string>> {
    std::optional<std::tuple<Rational, Money, std::string>> best;
    for (const auto& p : instance.projects()) {
      if (bought.count(p.id)) continue;
      const auto who = approvers(p.id, profile, instance);
      if (who.empty()) continue;
      auto a = mes_affordability(p.cost, budgets, who);
      if (!a) continue;
      std::tuple<Rational, Money, std::string> key{a->alpha, p.cost, p.id};
      if (!best || key < *best) best = key;
    }
    return best;
  };
  for (const auto& pid : ledger.selection_order) {
    auto best = best_now();
    if (!best) return "bought " + pid + " although nothing was affordable";
    if (std::get<2>(*best) != pid) return "bought " + pid + " but " + std::get<2>(*best) + " had lower alpha";
    if (std::get<0>(*best) != ledger.affordabilities.at(pid)) return "recorded alpha of " + pid + " is off";
    for (const auto& [voter, pay] : ledger.payments.at(pid)) budgets[voter] -= pay;
    bought.insert(pid);
  }
  if (auto rest = best_now()) return "stopped while " + std::get<2>(*rest) + " was affordable";
  return {};
}

/// The production engine agrees with the literal per-voter implementation.
inline std::string oracle_equivalence(const Instance& instance, const Profile& profile) {
  auto [allocation, ledger] = mes(instance, profile);
  auto ref = oracle::brute_force_mes(instance, profile);
  if (ledger.selection_order != ref.order) return "selection order differs from the oracle";
  for (const auto& [voter, budget] : ref.budgets) {
    if (ledger.budgets.at(voter).value() != budget) return "final budget of " + voter + " differs from the oracle";
  }
  return {};
}

inline std::string completeness(const Instance& instance, const Profile& profile) {
  for (auto variant : {RuleVariant::kGreedCost, RuleVariant::kMesPlus, RuleVariant::kMesStarPlus}) {
    RuleSpec spec;
    spec.variant = variant;
    spec.epsilon = Money(1);  // coarse rounds keep the suite fast; completeness holds for any step
    const auto out = run_rule(spec, instance, profile);
    if (!is_complete(out.allocation, instance)) return spec.name() + " output is not complete";
  }
  return {};
}

struct SuiteResult {
  std::size_t instances = 0;
  std::size_t small_instances = 0;  // n <= 12 and m <= 6, checked against the oracle
  std::string failure;
};

/// Property checks over `count` random elections with n <= 50 and m <= 20.
/// A third of the draws are kept to n <= 12 and m <= 6 so the oracle sees
/// plenty of instances.
inline SuiteResult random_suite(std::size_t count, std::uint64_t seed, bool with_completeness = true) {
  SuiteResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
    const bool small = i % 3 == 0;
    auto [instance, profile] = oracle::random_election(rng, small ? 12 : 50, small ? 6 : 20);
    ++r.instances;
    std::string err = ledger_conservation(instance, profile);
    if (err.empty() && profile.size() <= 12 && instance.size() <= 6) {
      ++r.small_instances;
      err = oracle_equivalence(instance, profile);
      if (err.empty()) err = alpha_minimality(instance, profile);
    }
    if (err.empty() && with_completeness) err = completeness(instance, profile);
    if (!err.empty()) r.failure = "instance " + std::to_string(i) + ": " + err;
  }
  return r;
}

/// write -> parse reproduces the model for every .pb file under `dir`.
inline std::string round_trip_directory(const std::filesystem::path& dir, std::size_t* files = nullptr) {
  std::size_t seen = 0;
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".pb") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& path : paths) {
    ParseOptions options;
    options.default_id = path.stem().string();
    auto [instance, profile] = parse_pabulib(read_file(path), options);
    auto [instance2, profile2] = parse_pabulib(write_pabulib(instance, profile), options);
    if (!(instance == instance2)) return path.filename().string() + ": instance changed on round trip";
    if (!(profile == profile2)) return path.filename().string() + ": profile changed on round trip";
    ++seen;
  }
  if (files) *files = seen;
  if (seen == 0) return "no .pb files in " + dir.string();
  return {};
}

/// Gini bounds, agreement with the pairwise formula, scale invariance;
/// similarity symmetry, bounds and identity, on random vectors/allocations.
inline std::string metric_invariants(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> value(0, 50), len(1, 12);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Rational> x(static_cast<std::size_t>(len(rng)));
    for (auto& v : x) v = Rational(value(rng)) / (1 + value(rng) % 4);
    const Rational g = gini(std::span<const Rational>(x));
    if (g < 0 || g >= 1) return "gini outside [0,1)";
    if (g != oracle::pairwise_gini(x)) return "gini differs from the pairwise formula";
    std::vector<Rational> scaled;
    for (const auto& v : x) scaled.push_back(v * 7);
    if (gini(std::span<const Rational>(scaled)) != g) return "gini not scale invariant";
    std::vector<Rational> shuffled = x;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (gini(std::span<const Rational>(shuffled)) != g) return "gini depends on order";
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto [instance, profile] = oracle::random_election(rng, 10, 10);
    const Allocation g = greed_cost(instance, profile);
    RuleSpec plus;
    plus.variant = RuleVariant::kMesPlus;
    const Allocation m = run_rule(plus, instance, profile).allocation;
    const Rational s = similarity(g, m, instance);
    if (s != similarity(m, g, instance)) return "similarity not symmetric";
    if (s < 0 || s > 1) return "similarity outside [0,1]";
    if (similarity(g, g, instance) != 1) return "similarity of an allocation to itself is not 1";
  }
  return {};
}

/// p-values against the quadrature oracle on a grid of (t, df).
inline std::string t_distribution_grid(double tolerance, double* worst = nullptr) {
  double max_err = 0;
  for (double df : {1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 14.0, 20.0, 30.0, 34.0, 50.0, 100.0}) {
    for (double t : {0.0, 0.05, 0.3, 0.7, 1.0, 1.5, 2.0, 2.5, 3.0, 3.4641016151377544, 4.0, 6.0, 10.0}) {
      const double p = stats::student_t_two_sided_p(t, df);
      const double q = oracle::t_two_sided_by_quadrature(t, df);
      max_err = std::max(max_err, std::fabs(p - q));
      if (std::fabs(p - q) > tolerance) {
        std::ostringstream os;
        os << "p(" << t << ", " << df << ") = " << p << " but quadrature gives " << q;
        return os.str();
      }
    }
  }
  if (worst) *worst = max_err;
  return {};
}

}  // namespace checks
