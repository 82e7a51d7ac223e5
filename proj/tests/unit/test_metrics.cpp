#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pbeval;

namespace {

Project make(const std::string& id, long cost, std::set<std::string> cats = {}) {
  Project p;
  p.id = id;
  p.cost = Money(cost);
  p.categories = std::move(cats);
  return p;
}

Profile ballots(const Instance& inst, std::vector<ProjectIds> approved) {
  std::vector<ApprovalBallot> bs;
  for (std::size_t i = 0; i < approved.size(); ++i) bs.push_back({"v" + std::to_string(i + 1), approved[i], {}});
  return Profile(std::move(bs), inst);
}

std::vector<Rational> rationals(std::initializer_list<long> xs) {
  std::vector<Rational> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

Rational gini_of(const std::vector<Rational>& v) { return gini(std::span<const Rational>(v)); }

}  // namespace

TEST(Similarity, IdentityAndDisjoint) {
  Instance inst({make("a", 3), make("b", 5)}, Money(10));
  Allocation a(inst, {"a"}), b(inst, {"b"}), both(inst, {"a", "b"}), none(inst, {});
  EXPECT_EQ(similarity(a, a, inst), 1);
  EXPECT_EQ(similarity(a, b, inst), 0);
  EXPECT_EQ(similarity(none, none, inst), 1);
  EXPECT_EQ(similarity(none, a, inst), 0);
  // overlap 3, mean cost (3 + 8) / 2
  EXPECT_EQ(similarity(a, both, inst), Rational(6) / 11);
}

TEST(Similarity, OverlapOfTwoLargeSelections) {
  // shared projects worth 63300; one rule adds 29000, the other 20000 + 8250
  Instance inst({make("s1", 30000), make("s2", 20000), make("s3", 7000), make("s4", 6300), make("g", 29000),
                 make("m1", 20000), make("m2", 8250)},
                Money(100000));
  Allocation greedy(inst, {"s1", "s2", "s3", "s4", "g"});
  Allocation mes(inst, {"s1", "s2", "s3", "s4", "m1", "m2"});
  const Rational s = similarity(greedy, mes, inst);
  EXPECT_EQ(s, Rational(63300) / 91925);
  EXPECT_NEAR(s.get_d(), 0.6886, 5e-5);
}

TEST(CostSatisfaction, NormalisedByBudget) {
  Instance inst({make("x", 6), make("y", 4)}, Money(10));
  Profile prof = ballots(inst, {{"x", "y"}, {"x"}, {}});
  const auto sat = cost_satisfaction(prof, Allocation(inst, {"x", "y"}), inst);
  ASSERT_EQ(sat.size(), 3u);
  EXPECT_EQ(sat[0], 1);
  EXPECT_EQ(sat[1], Rational(3) / 5);
  EXPECT_EQ(sat[2], 0);
}

TEST(Gini, Examples) {
  EXPECT_EQ(gini_of(rationals({7, 7, 7})), 0);
  EXPECT_EQ(gini_of(rationals({0, 1})), Rational(1) / 2);
  EXPECT_EQ(gini_of(rationals({0, 0, 0})), 0);
  EXPECT_EQ(gini_of({}), 0);
  EXPECT_EQ(gini_of(rationals({0, 0, 0, 1})), Rational(3) / 4);
}

TEST(Gini, AgreesWithPairwiseDefinition) {
  for (const auto& v : {rationals({1, 2, 3}), rationals({5, 0, 0, 2, 9}), rationals({4})}) {
    EXPECT_EQ(gini_of(v), oracle::pairwise_gini(v));
  }
}

TEST(Effort, SplitsCostOverApprovers) {
  Instance inst({make("x", 6), make("y", 4), make("z", 5)}, Money(15));
  Profile prof = ballots(inst, {{"x", "y"}, {"x"}, {}});
  const Allocation a(inst, {"x", "y", "z"});
  const auto e = effort(prof, a, inst);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], Money(7));
  EXPECT_EQ(e[1], Money(3));
  EXPECT_EQ(e[2], Money(0));
  // total effort equals the cost of the selected projects someone approves
  Money sum;
  for (const auto& m : e) sum += m;
  EXPECT_EQ(sum, Money(10));
}

TEST(Happiness, Cases) {
  Instance inst({make("x", 6), make("y", 4)}, Money(10));
  Profile prof = ballots(inst, {{"x"}, {"y"}, {}, {"x", "y"}});
  EXPECT_EQ(happiness(prof, Allocation(inst, {"x"})), Rational(1) / 2);
  EXPECT_EQ(happiness(prof, Allocation(inst, {"x", "y"})), Rational(3) / 4);
  EXPECT_EQ(happiness(prof, Allocation(inst, {})), 0);
  EXPECT_EQ(happiness(Profile(), Allocation(inst, {})), 1);
}

TEST(CategoryShare, VoterShareSkipsEmptyBallots) {
  Instance inst({make("c", 50, {"C"}), make("o", 50, {"D"})}, Money(100));
  Profile prof = ballots(inst, {{"c", "o"}, {"o"}, {}});
  EXPECT_EQ(voter_category_share(prof, inst, "C"), Rational(1) / 4);
  EXPECT_EQ(voter_category_share(prof, inst, "D"), Rational(3) / 4);
  EXPECT_EQ(voter_category_share(Profile(), inst, "C"), 0);
}

TEST(CategoryShare, RuleShareOfSpending) {
  Instance inst({make("ps", 111500, {"Public space"}), make("rest", 154260, {"Other"})}, Money(300000));
  auto q = rule_category_share(Allocation(inst, {"ps", "rest"}), inst, "Public space");
  ASSERT_TRUE(q);
  EXPECT_EQ(*q, Rational(111500) / 265760);
  EXPECT_NEAR(q->get_d(), 0.4196, 5e-5);
  EXPECT_FALSE(rule_category_share(Allocation(inst, {}), inst, "Public space"));
  EXPECT_EQ(*rule_category_share(Allocation(inst, {"rest"}), inst, "Public space"), 0);
}

TEST(Proportionality, PerfectAndWorstCase) {
  Instance inst({make("c", 5, {"C"}), make("u", 5)}, Money(10));
  Profile prof = ballots(inst, {{"c"}, {"c"}});
  auto worst = category_proportionality(prof, inst, Allocation(inst, {"u"}));
  ASSERT_TRUE(worst);
  EXPECT_DOUBLE_EQ(worst->disproportionality, 1.0);
  EXPECT_DOUBLE_EQ(worst->proportionality, std::exp(-1.0));
  auto perfect = category_proportionality(prof, inst, Allocation(inst, {"c"}));
  ASSERT_TRUE(perfect);
  EXPECT_DOUBLE_EQ(perfect->proportionality, 1.0);
  EXPECT_FALSE(category_proportionality(prof, inst, Allocation(inst, {})));

  Instance plain({make("a", 5)}, Money(10));
  EXPECT_FALSE(category_proportionality(ballots(plain, {{"a"}}), plain, Allocation(plain, {"a"})));
}

TEST(Proportionality, RootMeanSquareOverCategories) {
  Instance inst({make("a", 30, {"A"}), make("b", 10, {"B"})}, Money(40));
  Profile prof = ballots(inst, {{"a"}, {"b"}});
  // voters: A 1/2, B 1/2; rule: A 3/4, B 1/4
  auto r = category_proportionality(prof, inst, Allocation(inst, {"a", "b"}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->mean_squared_difference, Rational(1) / 16);
  EXPECT_DOUBLE_EQ(r->proportionality, std::exp(-0.25));
}

TEST(EffectScore, IdenticalAllocationsScoreZero) {
  Instance inst({make("a", 30, {"A"}), make("b", 10, {"B"})}, Money(40));
  Profile prof = ballots(inst, {{"a"}, {"b"}});
  Allocation x(inst, {"a"});
  auto s = effect_score(inst, prof, x, x);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(*s, 0.0);
  Instance plain({make("a", 5)}, Money(10));
  EXPECT_FALSE(effect_score(plain, ballots(plain, {{"a"}}), Allocation(plain, {"a"}), Allocation(plain, {"a"})));
}

TEST(EffectScore, RewardsProportionalAndEqualOutcome) {
  Instance inst({make("a", 20, {"A"}), make("b", 20, {"B"}), make("a2", 20, {"A"})}, Money(40));
  Profile prof = ballots(inst, {{"a", "a2"}, {"a", "a2"}, {"b"}, {"b"}});
  Allocation greedy(inst, {"a", "a2"}), fair(inst, {"a", "b"});
  auto s = effect_score(inst, prof, greedy, fair);
  ASSERT_TRUE(s);
  EXPECT_GT(*s, 0.0);
  EXPECT_DOUBLE_EQ(*effect_score(inst, prof, fair, greedy), -*s);
}

TEST(MedianCost, OddAndEven) {
  Instance inst({make("a", 1), make("b", 2), make("c", 4)}, Money(10));
  EXPECT_EQ(*median_selected_cost(Allocation(inst, {"a", "b", "c"}), inst), Money(2));
  EXPECT_EQ(*median_selected_cost(Allocation(inst, {"a", "b"}), inst), Money::cents(150));
  EXPECT_FALSE(median_selected_cost(Allocation(inst, {}), inst));
}

TEST(EvaluateMetrics, EmptyBallotsOptional) {
  Instance inst({make("x", 6), make("y", 4)}, Money(10));
  Profile prof = ballots(inst, {{"x"}, {}});
  const Allocation a(inst, {"x"});
  const RuleMetrics all = evaluate_metrics(inst, prof, a, a);
  EXPECT_EQ(all.similarity, 1);
  EXPECT_EQ(all.winners, 1u);
  EXPECT_EQ(all.happiness, Rational(1) / 2);
  EXPECT_EQ(all.avg_satisfaction, Rational(3) / 10);
  EXPECT_EQ(all.gini_cost, Rational(1) / 2);
  EXPECT_FALSE(all.proportionality);

  MetricOptions opts;
  opts.include_empty_ballots = false;
  const RuleMetrics some = evaluate_metrics(inst, prof, a, Allocation(inst, {"y"}), opts);
  EXPECT_EQ(some.similarity, 0);
  EXPECT_EQ(some.happiness, 1);
  EXPECT_EQ(some.avg_satisfaction, Rational(3) / 5);
  EXPECT_EQ(some.gini_cost, 0);
  EXPECT_EQ(some.gini_effort, 0);
}
