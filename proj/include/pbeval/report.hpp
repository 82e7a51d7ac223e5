#pragma once

// JSON forms of the corpus reports. Aggregate numbers carry 4 significant
// digits; money stays exact.

#include "pbeval/analysis.hpp"
#include "pbeval/serialize.hpp"

namespace pbeval {

/// A double rounded to 4 significant digits; null when undefined.
inline Json round4(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? Json(nullptr) : Json(sig4(v));
  return Json(std::stod(sig4(v)));
}

inline Json round4(const Rational& r) { return round4(r.get_d()); }

inline Json to_json(const InstanceStats& s) {
  Json j;
  j["instance_id"] = s.instance_id;
  j["vote_count"] = s.vote_count;
  j["project_count"] = s.project_count;
  j["budget"] = s.budget.str();
  j["mean_project_cost_ratio"] = round4(s.mean_project_cost_ratio);
  j["scarcity"] = round4(s.scarcity);
  j["mean_ballot_cost_ratio"] = round4(s.mean_ballot_cost_ratio);
  return j;
}

inline Json to_json(const CorpusSummary& s) {
  Json j;
  j["instances"] = s.instances;
  j["median_vote_count"] = round4(s.median_vote_count);
  j["median_project_count"] = round4(s.median_project_count);
  j["median_budget"] = round4(s.median_budget);
  j["median_scarcity"] = round4(s.median_scarcity);
  j["median_project_cost_ratio"] = round4(s.median_project_cost_ratio);
  j["median_ballot_cost_ratio"] = round4(s.median_ballot_cost_ratio);
  return j;
}

inline Json to_json(const ComparisonRow& r) {
  Json j;
  j["metric"] = r.metric;
  j["rule"] = r.rule;
  j["n"] = r.count;
  j["mean"] = round4(r.mean);
  j["standard_error"] = round4(r.standard_error);
  j["t"] = round4(r.t);
  j["p_value"] = round4(r.p_value);
  j["significant"] = r.significant;
  return j;
}

inline Json to_json(const RuleMetrics& m) {
  Json j;
  j["similarity"] = round4(m.similarity);
  j["winners"] = m.winners;
  j["median_cost"] = m.median_cost ? Json(m.median_cost->str()) : Json(nullptr);
  j["proportionality"] = m.proportionality ? round4(*m.proportionality) : Json(nullptr);
  j["avg_satisfaction"] = round4(m.avg_satisfaction);
  j["gini_cost"] = round4(m.gini_cost);
  j["gini_effort"] = round4(m.gini_effort);
  j["happiness"] = round4(m.happiness);
  return j;
}

inline Json to_json(const Comparison& c) {
  Json j;
  j["rules"] = c.rules;
  j["instances"] = c.instances.size();
  Json rows = Json::array();
  for (const auto& r : c.rows) rows.push_back(to_json(r));
  j["rows"] = std::move(rows);
  return j;
}

/// The per-instance table as JSON records, same column order as the CSV.
inline Json instance_table_json(const Comparison& c) {
  Json rows = Json::array();
  for (const auto& ev : c.instances) {
    for (std::size_t r = 0; r < c.rules.size(); ++r) {
      Json row;
      row["instance_id"] = ev.election->id();
      row["rule"] = c.rules[r];
      row.update(to_json(ev.metrics[r]));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline Json to_json(const InstanceReport& r) {
  Json j;
  j["instance_id"] = r.instance_id;
  j["effect_score"] = round4(r.effect_score);
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    Json block;
    block["label"] = b.label;
    block["count"] = b.projects.size();
    block["total"] = b.total.str();
    block["projects"] = b.projects;
    Json cats = Json::object();
    for (const auto& [label, tally] : b.by_category) {
      cats[label] = Json{{"count", tally.count}, {"cost", tally.cost.str()}};
    }
    block["by_category"] = std::move(cats);
    blocks.push_back(std::move(block));
  }
  j["blocks"] = std::move(blocks);
  Json bars = Json::array();
  for (const auto& b : r.bars) {
    bars.push_back(Json{{"category", b.label},
                        {"voters", round4(b.voters)},
                        {"greedcost", b.greedy ? round4(*b.greedy) : Json(nullptr)},
                        {"mes", b.mes ? round4(*b.mes) : Json(nullptr)}});
  }
  j["category_bars"] = std::move(bars);
  auto curve = [](const std::vector<Money>& v) {
    Json a = Json::array();
    for (const auto& m : v) a.push_back(m.str());
    return a;
  };
  j["satisfaction_curves"] = Json{{"common", curve(r.common_curve)},
                                  {"greedcost", curve(r.greedy_curve)},
                                  {"mes", curve(r.mes_curve)}};
  return j;
}

inline Json to_json(const Extremes& e) {
  Json j;
  Json ranking = Json::array();
  for (const auto& [id, score] : e.ranking) ranking.push_back(Json{{"instance_id", id}, {"effect_score", round4(score)}});
  j["ranking"] = std::move(ranking);
  j["min"] = to_json(e.min);
  j["median"] = to_json(e.median);
  j["max"] = to_json(e.max);
  return j;
}

/// Plain-text rendering of one extreme, in the shape of a category breakdown.
inline std::string render_report(const InstanceReport& r) {
  const Instance& instance = *r.instance;
  std::ostringstream os;
  os << "Instance " << r.instance_id << " (effect score " << sig4(r.effect_score) << ")\n";
  for (const auto& b : r.blocks) {
    os << "  Selected by " << b.label << " (" << b.total.str() << ", " << b.projects.size() << " projects)\n";
    for (const auto& id : b.projects) {
      const Project& p = instance.project(id);
      os << "    " << id << "  " << p.cost.str();
      if (!p.name.empty()) os << "  " << p.name;
      os << '\n';
    }
    for (const auto& [label, tally] : b.by_category) {
      os << "    [" << label << "] " << tally.count << " projects, " << tally.cost.str() << '\n';
    }
  }
  os << "  Category shares (voters / greedcost / mes):\n";
  for (const auto& b : r.bars) {
    os << "    " << b.label << ": " << sig4(b.voters.get_d()) << " / "
       << (b.greedy ? sig4(b.greedy->get_d()) : "-") << " / " << (b.mes ? sig4(b.mes->get_d()) : "-") << '\n';
  }
  return os.str();
}

}  // namespace pbeval
