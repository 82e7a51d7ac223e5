#pragma once

// Corpus-level experiments: descriptive statistics per instance, rule
// comparison with paired t-tests, size quadrants, and the qualitative
// min/median/max effect reports.

#include "pbeval/metrics.hpp"
#include "pbeval/pabulib.hpp"
#include "pbeval/rules.hpp"
#include "pbeval/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pbeval {

struct InstanceStats {
  std::string instance_id;
  std::size_t vote_count = 0;
  std::size_t project_count = 0;
  Money budget;
  Rational mean_project_cost_ratio;  // mean c(p) / b
  Rational scarcity;                 // sum c(p) / b
  Rational mean_ballot_cost_ratio;   // mean cost(A_i) / b
};

inline InstanceStats instance_stats(const Instance& instance, const Profile& profile) {
  InstanceStats s;
  s.instance_id = instance.id();
  s.vote_count = profile.size();
  s.project_count = instance.size();
  s.budget = instance.budget_limit();
  const Rational& b = instance.budget_limit().value();
  s.scarcity = instance.total_project_cost().value() / b;
  s.mean_project_cost_ratio = s.scarcity / static_cast<unsigned long>(instance.size());
  Money ballots;
  for (const auto& ballot : profile.ballots()) ballots += ballot_cost(ballot, instance);
  s.mean_ballot_cost_ratio =
      profile.empty() ? Rational(0) : Rational(ballots.value() / b / static_cast<unsigned long>(profile.size()));
  return s;
}

/// Medians of the per-instance statistics.
struct CorpusSummary {
  std::size_t instances = 0;
  double median_vote_count = 0;
  double median_project_count = 0;
  double median_budget = 0;
  double median_scarcity = 0;
  double median_project_cost_ratio = 0;
  double median_ballot_cost_ratio = 0;
};

inline CorpusSummary summarize(const std::vector<InstanceStats>& rows) {
  CorpusSummary s;
  s.instances = rows.size();
  auto med = [&](auto f) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(f(r));
    return stats::median(std::move(v));
  };
  s.median_vote_count = med([](const InstanceStats& r) { return static_cast<double>(r.vote_count); });
  s.median_project_count = med([](const InstanceStats& r) { return static_cast<double>(r.project_count); });
  s.median_budget = med([](const InstanceStats& r) { return r.budget.to_double(); });
  s.median_scarcity = med([](const InstanceStats& r) { return r.scarcity.get_d(); });
  s.median_project_cost_ratio = med([](const InstanceStats& r) { return r.mean_project_cost_ratio.get_d(); });
  s.median_ballot_cost_ratio = med([](const InstanceStats& r) { return r.mean_ballot_cost_ratio.get_d(); });
  return s;
}

struct Quadrant {
  std::string label;
  std::vector<std::size_t> members;  // indices into the dataset
};

/// Vote and project count of one instance.
struct InstanceSize {
  std::size_t votes = 0;
  std::size_t projects = 0;
};

/// Splits at the median vote and project counts. Instances on a median count as small.
inline std::vector<Quadrant> quadrant_partition(std::span<const InstanceSize> sizes) {
  if (sizes.empty()) throw std::invalid_argument("quadrant partition of an empty dataset");
  std::vector<double> votes, projects;
  for (const auto& s : sizes) {
    votes.push_back(static_cast<double>(s.votes));
    projects.push_back(static_cast<double>(s.projects));
  }
  const double mv = stats::median(votes), mp = stats::median(projects);
  std::vector<Quadrant> out{{"small-votes/small-projects", {}},
                            {"small-votes/large-projects", {}},
                            {"large-votes/small-projects", {}},
                            {"large-votes/large-projects", {}}};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const bool large_votes = votes[i] > mv, large_projects = projects[i] > mp;
    out[(large_votes ? 2 : 0) + (large_projects ? 1 : 0)].members.push_back(i);
  }
  return out;
}

inline std::vector<Quadrant> quadrant_partition(std::span<const Election> dataset) {
  std::vector<InstanceSize> sizes;
  for (const auto& e : dataset) sizes.push_back({e.profile.size(), e.instance.size()});
  return quadrant_partition(std::span<const InstanceSize>(sizes));
}

/// Runs `fn(i)` for every index, spread over the available cores.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// One instance with every rule's allocation and metrics.
struct EvaluatedInstance {
  const Election* election = nullptr;
  Allocation reference;  // GreedCost
  std::vector<Allocation> allocations;  // parallel to the rule specs
  std::vector<RuleMetrics> metrics;
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"similarity", "winners", "median_cost", "proportionality",
                                              "avg_satisfaction", "gini_cost", "gini_effort", "happiness"};
  return names;
}

inline std::optional<double> metric_value(const RuleMetrics& m, const std::string& name) {
  if (name == "similarity") return m.similarity.get_d();
  if (name == "winners") return static_cast<double>(m.winners);
  if (name == "median_cost") return m.median_cost ? std::optional<double>(m.median_cost->to_double()) : std::nullopt;
  if (name == "proportionality") return m.proportionality;
  if (name == "avg_satisfaction") return m.avg_satisfaction.get_d();
  if (name == "gini_cost") return m.gini_cost.get_d();
  if (name == "gini_effort") return m.gini_effort.get_d();
  if (name == "happiness") return m.happiness.get_d();
  throw std::invalid_argument("unknown metric " + name);
}

struct ComparisonRow {
  std::string metric;
  std::string rule;
  std::size_t count = 0;  // instances where the metric is defined for rule and GreedCost
  double mean = 0;
  double standard_error = 0;
  double t = 0;
  double p_value = 1;
  bool significant = false;  // p < 0.05
};

struct Comparison {
  std::vector<std::string> rules;
  std::vector<EvaluatedInstance> instances;  // id-sorted
  std::vector<ComparisonRow> rows;           // metric-major, rule order within
};

struct CompareOptions {
  MetricOptions metrics;
  unsigned threads = 0;
  TieBreak reference_tiebreak;
};

inline ComparisonRow compare_metric(const std::string& metric, const std::string& rule,
                                    const std::vector<EvaluatedInstance>& instances, std::size_t rule_index,
                                    std::size_t greedy_index) {
  std::vector<double> x, y;
  for (const auto& e : instances) {
    auto a = metric_value(e.metrics[rule_index], metric);
    auto b = metric_value(e.metrics[greedy_index], metric);
    if (a && b) {
      x.push_back(*a);
      y.push_back(*b);
    }
  }
  ComparisonRow row;
  row.metric = metric;
  row.rule = rule;
  row.count = x.size();
  row.mean = stats::mean(x);
  row.standard_error = stats::standard_error(x);
  if (x.size() >= 2) {
    const auto test = stats::paired_t_test(x, y);
    row.t = test.t;
    row.p_value = test.p;
  } else if (x.size() == 1 && x[0] != y[0]) {
    row.p_value = std::numeric_limits<double>::quiet_NaN();
  }
  row.significant = row.p_value < 0.05;
  return row;
}

/// GreedCost metrics sit after the rules' metrics in each evaluated instance.
inline std::vector<ComparisonRow> comparison_rows(const std::vector<std::string>& rules,
                                                  const std::vector<EvaluatedInstance>& instances) {
  std::vector<ComparisonRow> rows;
  for (const auto& metric : metric_names()) {
    for (std::size_t r = 0; r < rules.size(); ++r) {
      rows.push_back(compare_metric(metric, rules[r], instances, r, rules.size()));
    }
  }
  return rows;
}

/// Applies every rule to every election and compares each against GreedCost.
inline Comparison compare_rules(std::span<const Election> dataset, const std::vector<RuleSpec>& specs,
                                const CompareOptions& options = {}) {
  if (dataset.empty()) throw std::invalid_argument("rule comparison of an empty dataset");
  Comparison out;
  for (const auto& s : specs) out.rules.push_back(s.name());
  std::vector<const Election*> ordered;
  for (const auto& e : dataset) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Election* a, const Election* b) { return a->id() < b->id(); });

  out.instances.resize(ordered.size());
  parallel_for(ordered.size(), [&](std::size_t i) {
    const Election& e = *ordered[i];
    EvaluatedInstance ev;
    ev.election = &e;
    ev.reference = greed_cost(e.instance, e.profile, options.reference_tiebreak);
    for (const auto& spec : specs) {
      ev.allocations.push_back(run_rule(spec, e.instance, e.profile).allocation);
      ev.metrics.push_back(
          evaluate_metrics(e.instance, e.profile, ev.allocations.back(), ev.reference, options.metrics));
    }
    ev.metrics.push_back(evaluate_metrics(e.instance, e.profile, ev.reference, ev.reference, options.metrics));
    out.instances[i] = std::move(ev);
  }, options.threads);

  out.rows = comparison_rows(out.rules, out.instances);
  return out;
}

/// Rows for a subset of an existing comparison, e.g. one quadrant.
inline Comparison restrict_comparison(const Comparison& full, const std::vector<std::size_t>& members) {
  Comparison out;
  out.rules = full.rules;
  for (std::size_t i : members) out.instances.push_back(full.instances.at(i));
  out.rows = comparison_rows(out.rules, out.instances);
  return out;
}

// ---- qualitative extremes ----------------------------------------------

struct CategoryTally {
  std::size_t count = 0;
  Money cost;
};

struct SelectionBlock {
  std::string label;  // "both", "greedcost only", "mes*+ only"
  Money total;
  std::vector<std::string> projects;
  std::map<std::string, CategoryTally> by_category;  // uncategorised projects under "(none)"
};

struct CategoryBar {
  std::string label;
  Rational voters;
  std::optional<Rational> greedy;
  std::optional<Rational> mes;
};

struct InstanceReport {
  std::string instance_id;
  const Instance* instance = nullptr;
  double effect_score = 0;
  std::vector<SelectionBlock> blocks;
  std::vector<CategoryBar> bars;
  /// Per-voter cost of approved selected projects, each curve sorted ascending.
  std::vector<Money> common_curve, greedy_curve, mes_curve;
};

struct Extremes {
  InstanceReport min, median, max;
  std::vector<std::pair<std::string, double>> ranking;  // ascending effect score
};

inline SelectionBlock make_block(std::string label, const ProjectIds& ids, const Instance& instance) {
  SelectionBlock block;
  block.label = std::move(label);
  for (const auto& id : ids) {
    const Project& p = instance.project(id);
    block.total += p.cost;
    block.projects.push_back(id);
    if (p.categories.empty()) {
      auto& t = block.by_category["(none)"];
      ++t.count;
      t.cost += p.cost;
    }
    for (const auto& c : p.categories) {
      auto& t = block.by_category[c];
      ++t.count;
      t.cost += p.cost;
    }
  }
  return block;
}

inline InstanceReport instance_report(const Instance& instance, const Profile& profile, const Allocation& greedy,
                                      const Allocation& mes, double score, const std::string& mes_label = "mes*+") {
  InstanceReport r;
  r.instance_id = instance.id();
  r.instance = &instance;
  r.effect_score = score;
  ProjectIds both, greedy_only, mes_only;
  for (const auto& id : greedy.selected()) (mes.contains(id) ? both : greedy_only).insert(id);
  for (const auto& id : mes.selected()) {
    if (!greedy.contains(id)) mes_only.insert(id);
  }
  r.blocks.push_back(make_block("both", both, instance));
  r.blocks.push_back(make_block("greedcost only", greedy_only, instance));
  r.blocks.push_back(make_block(mes_label + " only", mes_only, instance));
  for (const auto& label : instance.categories()) {
    r.bars.push_back(CategoryBar{label, voter_category_share(profile, instance, label),
                                 rule_category_share(greedy, instance, label),
                                 rule_category_share(mes, instance, label)});
  }
  const Allocation common(instance, both);
  r.common_curve = approved_selected_cost(profile, common, instance);
  r.greedy_curve = approved_selected_cost(profile, greedy, instance);
  r.mes_curve = approved_selected_cost(profile, mes, instance);
  std::sort(r.common_curve.begin(), r.common_curve.end());
  std::sort(r.greedy_curve.begin(), r.greedy_curve.end());
  std::sort(r.mes_curve.begin(), r.mes_curve.end());
  return r;
}

/// Ranks categorised instances by effect score and reports the minimum,
/// median (lower middle for even counts) and maximum.
inline Extremes extract_extremes(const std::vector<EvaluatedInstance>& instances, std::size_t mes_rule_index,
                                 const std::string& mes_label = "mes*+") {
  struct Scored {
    const EvaluatedInstance* ev;
    double score;
  };
  std::vector<Scored> scored;
  for (const auto& ev : instances) {
    const auto& e = *ev.election;
    if (auto s = effect_score(e.instance, e.profile, ev.reference, ev.allocations.at(mes_rule_index))) {
      scored.push_back({&ev, *s});
    }
  }
  if (scored.empty()) throw std::runtime_error("no categorised instances to rank");
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.ev->election->id() < b.ev->election->id();
  });
  auto report = [&](const Scored& s) {
    const auto& e = *s.ev->election;
    return instance_report(e.instance, e.profile, s.ev->reference, s.ev->allocations.at(mes_rule_index), s.score,
                           mes_label);
  };
  Extremes out;
  for (const auto& s : scored) out.ranking.emplace_back(s.ev->election->id(), s.score);
  out.min = report(scored.front());
  out.median = report(scored[(scored.size() - 1) / 2]);
  out.max = report(scored.back());
  return out;
}

// ---- rendering ---------------------------------------------------------

/// Four significant digits, "nan" for undefined values.
inline std::string sig4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string stats_csv(const std::vector<InstanceStats>& rows) {
  std::ostringstream os;
  os << "instance_id,vote_count,project_count,budget,mean_project_cost_ratio,scarcity,mean_ballot_cost_ratio\n";
  for (const auto& r : rows) {
    os << r.instance_id << ',' << r.vote_count << ',' << r.project_count << ',' << r.budget.str() << ','
       << sig4(r.mean_project_cost_ratio.get_d()) << ',' << sig4(r.scarcity.get_d()) << ','
       << sig4(r.mean_ballot_cost_ratio.get_d()) << '\n';
  }
  return os.str();
}

inline std::string comparison_csv(const Comparison& c) {
  std::ostringstream os;
  os << "metric,rule,n,mean,standard_error,t,p_value,significant\n";
  for (const auto& r : c.rows) {
    os << r.metric << ',' << r.rule << ',' << r.count << ',' << sig4(r.mean) << ',' << sig4(r.standard_error) << ','
       << sig4(r.t) << ',' << sig4(r.p_value) << ',' << (r.significant ? 1 : 0) << '\n';
  }
  return os.str();
}

/// Per-instance table: fixed columns, one row per instance and rule.
inline std::string instance_table_csv(const Comparison& c) {
  std::ostringstream os;
  os << "instance_id,rule,similarity,winners,median_cost,proportionality,avg_satisfaction,gini_cost,gini_effort,"
        "happiness\n";
  for (const auto& ev : c.instances) {
    for (std::size_t r = 0; r < c.rules.size(); ++r) {
      const auto& m = ev.metrics[r];
      os << ev.election->id() << ',' << c.rules[r] << ',' << sig4(m.similarity.get_d()) << ',' << m.winners << ','
         << (m.median_cost ? m.median_cost->str() : "") << ','
         << (m.proportionality ? sig4(*m.proportionality) : "") << ',' << sig4(m.avg_satisfaction.get_d()) << ','
         << sig4(m.gini_cost.get_d()) << ',' << sig4(m.gini_effort.get_d()) << ',' << sig4(m.happiness.get_d())
         << '\n';
    }
  }
  return os.str();
}

}  // namespace pbeval
