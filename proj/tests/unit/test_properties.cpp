#include "checks.hpp"

#include <gtest/gtest.h>

using namespace pbeval;

namespace {

/// The election with every cost and the budget multiplied by `k`.
std::pair<Instance, Profile> scaled(const Instance& inst, const Profile& prof, const Rational& k) {
  std::vector<Project> projects = inst.projects();
  for (auto& p : projects) p.cost = p.cost * k;
  Instance out(std::move(projects), inst.budget_limit() * k, inst.meta());
  return {std::move(out), prof};
}

}  // namespace

TEST(Random, MesLedgerOracleAndCompleteness) {
  const auto r = checks::random_suite(300, 11);
  EXPECT_EQ(r.failure, "");
  EXPECT_EQ(r.instances, 300u);
  EXPECT_GE(r.small_instances, 100u);
}

TEST(Random, MetricInvariants) { EXPECT_EQ(checks::metric_invariants(300, 12), ""); }

TEST(Random, GreedCostMatchesLiteralDefinition) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    auto [inst, prof] = oracle::random_election(rng, 30, 15);
    ASSERT_EQ(greed_cost(inst, prof).selected(), oracle::brute_force_greedy(inst, prof)) << "draw " << i;
  }
}

TEST(Random, RulesIgnoreTheCurrencyUnit) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 200; ++i) {
    auto [inst, prof] = oracle::random_election(rng, 30, 15);
    const Rational k = Rational(1 + static_cast<long>(rng() % 50)) / (1 + static_cast<long>(rng() % 7));
    auto [inst2, prof2] = scaled(inst, prof, k);
    ASSERT_EQ(greed_cost(inst, prof).selected(), greed_cost(inst2, prof2).selected()) << "draw " << i;
    ASSERT_EQ(mes(inst, prof).first.selected(), mes(inst2, prof2).first.selected()) << "draw " << i;
  }
}

TEST(Random, MesIgnoresVoterOrder) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    auto [inst, prof] = oracle::random_election(rng, 30, 15);
    std::vector<ApprovalBallot> shuffled = prof.ballots();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Profile prof2(std::move(shuffled), inst);
    const auto a = mes(inst, prof).second, b = mes(inst, prof2).second;
    ASSERT_EQ(a.selection_order, b.selection_order) << "draw " << i;
    ASSERT_EQ(a.budgets, b.budgets) << "draw " << i;
  }
}

TEST(Random, CompletionsNeverShrinkTheBase) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 150; ++i) {
    auto [inst, prof] = oracle::random_election(rng, 30, 15);
    const Allocation base = mes(inst, prof).first;
    RuleSpec plus;
    plus.variant = RuleVariant::kMesPlus;
    const Allocation completed = run_rule(plus, inst, prof).allocation;
    for (const auto& id : base.selected()) ASSERT_TRUE(completed.contains(id)) << "draw " << i;
    ASSERT_TRUE(is_complete(completed, inst));
  }
}
