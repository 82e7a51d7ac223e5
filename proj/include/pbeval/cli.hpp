#pragma once

// Command-line driver: stats, run, compare and extremes subcommands.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "pbeval/report.hpp"
#include "pbeval/trace.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace pbeval {

/// Raised for problems with the input data rather than the command line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cli {

/// Reads a flat key=value file. Blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw CLI::ValidationError("config", path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(std::string(detail::trim(body.substr(0, eq))), std::string(detail::trim(body.substr(eq + 1))));
  }
  return out;
}

/// Splits off `--config FILE` and turns its entries into flags placed before
/// the command-line ones, so explicit flags win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> rest;
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      entries = read_config(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      entries = read_config(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  if (entries.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};  // the subcommand
  for (const auto& [key, value] : entries) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : rest) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (value == "true") {
      out.push_back(flag);
    } else if (value != "false") {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

struct DatasetOptions {
  std::string dir;
  bool filter_defaults = false;
  std::optional<std::size_t> min_voters, min_projects;
  std::string skip_report;

  void add_to(CLI::App& app) {
    app.add_option("--dir", dir, "Directory of .pb files (default: $PB_DATA_DIR)");
    app.add_flag("--filter-defaults", filter_defaults, "Keep instances with >= 100 voters and >= 10 projects");
    app.add_option("--min-voters", min_voters, "Minimum number of voters");
    app.add_option("--min-projects", min_projects, "Minimum number of projects");
    app.add_option("--skip-report", skip_report, "Write skipped files as JSON lines to this path");
  }

  IngestFilter filter() const {
    IngestFilter f = filter_defaults ? IngestFilter{} : IngestFilter::none();
    if (min_voters) f.min_voters = *min_voters;
    if (min_projects) f.min_projects = *min_projects;
    return f;
  }

  IngestResult load() const {
    std::string path = dir;
    if (path.empty()) {
      if (const char* env = std::getenv("PB_DATA_DIR")) path = env;
    }
    if (path.empty()) throw CLI::RequiredError("--dir (or PB_DATA_DIR)");
    IngestResult result;
    try {
      result = ingest_directory(path, filter());
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
    if (!skip_report.empty()) {
      std::ofstream out(skip_report);
      if (!out) throw DataError("cannot write " + skip_report);
      out << skip_report_jsonl(result.skipped);
    }
    for (const auto& s : result.skipped) std::cerr << "skipped " << s.file << ": " << s.reason << '\n';
    if (result.accepted.empty()) throw DataError("no instances accepted from " + path);
    return result;
  }
};

struct RuleOptions {
  std::string epsilon;
  std::size_t max_iterations = 10000;
  std::string tiebreak = "cost,id";

  void add_to(CLI::App& app) {
    app.add_option("--epsilon", epsilon, "Budget increment per mes*+ round (default: one cent per voter)");
    app.add_option("--max-iterations", max_iterations, "Round limit for mes*+")->capture_default_str();
    app.add_option("--tiebreak", tiebreak, "Tie-breaking criteria, e.g. cost,id or -cost,input")
        ->capture_default_str();
  }

  RuleSpec spec(const std::string& rule) const {
    auto variant = parse_rule_name(rule);
    if (!variant) throw CLI::ValidationError("--rule", "unknown rule '" + rule + "'");
    RuleSpec s;
    s.variant = *variant;
    s.max_iterations = max_iterations;
    try {
      s.tiebreak = TieBreak::parse(tiebreak);
    } catch (const std::exception& e) {
      throw CLI::ValidationError("--tiebreak", e.what());
    }
    if (!epsilon.empty()) {
      Money m;
      try {
        m = Money::parse(epsilon);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--epsilon", "not a non-negative amount: " + epsilon);
      }
      if (m.is_zero()) throw CLI::ValidationError("--epsilon", "must be positive");
      s.epsilon = m;
    }
    return s;
  }
};

inline std::vector<std::string> split_rules(const std::string& list) {
  std::vector<std::string> out;
  for (auto& r : detail::split_list(list)) {
    if (!r.empty()) out.push_back(r);
  }
  if (out.empty()) throw CLI::ValidationError("--rules", "no rules given");
  return out;
}

/// Writes to `path`, or stdout when it is empty or "-".
inline void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

inline std::string render_stats(const IngestResult& data, const std::string& format, bool summary) {
  std::vector<InstanceStats> rows;
  for (const auto& e : data.accepted) rows.push_back(instance_stats(e.instance, e.profile));
  if (format == "json") {
    Json j;
    Json list = Json::array();
    for (const auto& r : rows) list.push_back(to_json(r));
    j["instances"] = std::move(list);
    j["summary"] = to_json(summarize(rows));
    return j.dump(2) + "\n";
  }
  std::string out = stats_csv(rows);
  if (summary) {
    const auto s = summarize(rows);
    std::ostringstream os;
    os << "\nmedian_vote_count,median_project_count,median_budget,median_scarcity,"
          "median_project_cost_ratio,median_ballot_cost_ratio\n"
       << sig4(s.median_vote_count) << ',' << sig4(s.median_project_count) << ',' << sig4(s.median_budget) << ','
       << sig4(s.median_scarcity) << ',' << sig4(s.median_project_cost_ratio) << ','
       << sig4(s.median_ballot_cost_ratio) << '\n';
    out += os.str();
  }
  return out;
}

inline std::vector<std::pair<std::string, Comparison>> comparison_subsets(const Comparison& full,
                                                                          bool by_quadrant) {
  std::vector<std::pair<std::string, Comparison>> out;
  out.emplace_back("all", full);
  if (!by_quadrant) return out;
  std::vector<InstanceSize> sizes;
  for (const auto& ev : full.instances) sizes.push_back({ev.election->profile.size(), ev.election->instance.size()});
  for (const auto& q : quadrant_partition(std::span<const InstanceSize>(sizes))) {
    out.emplace_back(q.label, restrict_comparison(full, q.members));
  }
  return out;
}

inline std::string render_comparison(const Comparison& full, const std::string& format, bool by_quadrant) {
  const auto subsets = comparison_subsets(full, by_quadrant);
  if (format == "json") {
    Json j;
    for (const auto& [label, c] : subsets) j[label] = to_json(c);
    return j.dump(2) + "\n";
  }
  if (!by_quadrant) return comparison_csv(full);
  std::ostringstream os;
  os << "subset," << comparison_csv(full).substr(0, comparison_csv(full).find('\n') + 1);
  for (const auto& [label, c] : subsets) {
    std::istringstream lines(comparison_csv(c));
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) os << label << ',' << line << '\n';
  }
  return os.str();
}

inline int run_main(const std::vector<std::string>& raw_args) {
  CLI::App app{"Participatory budgeting rule evaluation", "pbeval"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.footer("Any subcommand accepts --config FILE with key=value lines mirroring its flags.");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Per-instance statistics of a directory of elections");
  DatasetOptions stats_data;
  stats_data.add_to(*stats_cmd);
  std::string stats_format = "csv", stats_out;
  bool stats_summary = false;
  stats_cmd->add_option("--format", stats_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  stats_cmd->add_option("--out", stats_out, "Output file (default: stdout)");
  stats_cmd->add_flag("--summary", stats_summary, "Append corpus medians to the CSV");

  // run
  auto* run_cmd = app.add_subcommand("run", "Apply one rule to one election file");
  std::string run_file, run_rule_name = "mes*+", run_out, run_trace_out;
  bool run_trace = false, run_ledger = false;
  RuleOptions run_rules;
  run_cmd->add_option("--file", run_file, "PaBuLib file")->required();
  run_cmd->add_option("--rule", run_rule_name, "greedcost, mes, mes+ or mes*+")->capture_default_str();
  run_cmd->add_flag("--trace", run_trace, "Print the MES purchase trace after the JSON");
  run_cmd->add_option("--trace-out", run_trace_out, "Write the trace to this file instead");
  run_cmd->add_flag("--ledger", run_ledger, "Include the full MES payment ledger in the JSON");
  run_cmd->add_option("--out", run_out, "Output file for the JSON (default: stdout)");
  run_rules.add_to(*run_cmd);

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Compare rules against GreedCost over a directory");
  DatasetOptions compare_data;
  compare_data.add_to(*compare_cmd);
  RuleOptions compare_rules_opts;
  compare_rules_opts.add_to(*compare_cmd);
  std::string compare_rules_list = "greedcost,mes+,mes*+", compare_out, compare_table, compare_format = "csv";
  bool by_quadrant = false, exclude_empty = false;
  unsigned threads = 0;
  compare_cmd->add_option("--rules", compare_rules_list, "Comma-separated rules")->capture_default_str();
  compare_cmd->add_option("--out", compare_out, "Comparison report (default: stdout)");
  compare_cmd->add_option("--table", compare_table, "Per-instance metrics table");
  compare_cmd->add_option("--format", compare_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  compare_cmd->add_flag("--by-quadrant", by_quadrant, "Also report each size quadrant");
  compare_cmd->add_flag("--exclude-empty-ballots", exclude_empty,
                        "Leave voters without approvals out of satisfaction, effort and happiness");
  compare_cmd->add_option("--threads", threads, "Worker threads (default: all cores)");

  // extremes
  auto* extremes_cmd = app.add_subcommand("extremes", "Instances with the smallest, median and largest effect");
  DatasetOptions extremes_data;
  extremes_data.add_to(*extremes_cmd);
  RuleOptions extremes_rules;
  extremes_rules.add_to(*extremes_cmd);
  std::string extremes_rule = "mes*+", extremes_out, extremes_format = "json";
  unsigned extremes_threads = 0;
  extremes_cmd->add_option("--rule", extremes_rule, "Rule compared with GreedCost")->capture_default_str();
  extremes_cmd->add_option("--out", extremes_out, "Output file (default: stdout)");
  extremes_cmd->add_option("--format", extremes_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  extremes_cmd->add_option("--threads", extremes_threads, "Worker threads (default: all cores)");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);

    if (stats_cmd->parsed()) {
      emit(stats_out, render_stats(stats_data.load(), stats_format, stats_summary));
    } else if (run_cmd->parsed()) {
      const RuleSpec spec = run_rules.spec(run_rule_name);
      Election e = [&] {
        auto r = ingest_file(run_file, IngestFilter::none());
        if (auto* s = std::get_if<SkippedFile>(&r)) throw DataError(s->file + ": " + s->reason);
        return std::get<Election>(std::move(r));
      }();
      RuleOutcome outcome = run_rule(spec, e.instance, e.profile);
      Json j = to_json(outcome, spec, e.instance);
      if (!run_ledger) j.erase("ledger");
      emit(run_out, j.dump(2) + "\n");
      if (run_trace || !run_trace_out.empty()) {
        if (!outcome.ledger) throw CLI::ValidationError("--trace", "rule " + spec.name() + " has no MES trace");
        const std::string trace = emit_trace(*outcome.ledger, e.instance);
        emit(run_trace_out, (run_trace_out.empty() ? "\n" : "") + trace);
      }
    } else if (compare_cmd->parsed()) {
      std::vector<RuleSpec> specs;
      for (const auto& r : split_rules(compare_rules_list)) specs.push_back(compare_rules_opts.spec(r));
      const IngestResult data = compare_data.load();
      CompareOptions options;
      options.threads = threads;
      options.metrics.include_empty_ballots = !exclude_empty;
      options.reference_tiebreak = specs.front().tiebreak;
      const Comparison c = compare_rules(data.accepted, specs, options);
      emit(compare_out, render_comparison(c, compare_format, by_quadrant));
      if (!compare_table.empty()) {
        emit(compare_table, compare_format == "json" ? instance_table_json(c).dump(2) + "\n" : instance_table_csv(c));
      }
    } else if (extremes_cmd->parsed()) {
      const RuleSpec spec = extremes_rules.spec(extremes_rule);
      const IngestResult data = extremes_data.load();
      CompareOptions options;
      options.threads = extremes_threads;
      options.reference_tiebreak = spec.tiebreak;
      const Comparison c = compare_rules(data.accepted, {spec}, options);
      Extremes x;
      try {
        x = extract_extremes(c.instances, 0, spec.name());
      } catch (const std::runtime_error& err) {
        throw DataError(err.what());
      }
      if (extremes_format == "json") {
        emit(extremes_out, to_json(x).dump(2) + "\n");
      } else {
        std::string text = "Largest negative effect\n" + render_report(x.min) + "\nMedian effect\n" +
                           render_report(x.median) + "\nLargest positive effect\n" + render_report(x.max);
        emit(extremes_out, text);
      }
    }
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace cli

inline int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli::run_main(args);
}

}  // namespace pbeval
