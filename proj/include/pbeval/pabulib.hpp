#pragma once

// Reading and writing PaBuLib election files (META / PROJECTS / VOTES sections,
// ';'-separated rows), plus directory ingestion with size filters.

#include "pbeval/model.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pbeval {

enum class ParseErrorKind {
  kMissingSection,
  kSectionOrder,
  kMissingColumn,
  kMissingMetaKey,
  kMalformedRow,
  kBadNumber,
  kMissingCost,
  kNonPositive,
  kDuplicateId,
  kUnknownProject,
  kCountMismatch,
  kUnsupportedVoteType,
};

inline const char* to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::kMissingSection: return "missing section";
    case ParseErrorKind::kSectionOrder: return "section order";
    case ParseErrorKind::kMissingColumn: return "missing column";
    case ParseErrorKind::kMissingMetaKey: return "missing meta key";
    case ParseErrorKind::kMalformedRow: return "malformed row";
    case ParseErrorKind::kBadNumber: return "bad number";
    case ParseErrorKind::kMissingCost: return "missing cost";
    case ParseErrorKind::kNonPositive: return "non-positive amount";
    case ParseErrorKind::kDuplicateId: return "duplicate id";
    case ParseErrorKind::kUnknownProject: return "unknown project";
    case ParseErrorKind::kCountMismatch: return "count mismatch";
    case ParseErrorKind::kUnsupportedVoteType: return "unsupported vote type";
  }
  return "parse error";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + to_string(kind) + ": " + message),
        kind_(kind), line_(line) {}

  ParseErrorKind kind() const { return kind_; }
  /// 1-based line number; 0 when the problem is a missing piece of the file.
  std::size_t line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

/// A file as rows of named columns, before any interpretation.
struct PabulibDocument {
  struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  // source line of each row
    std::size_t header_line = 0;

    std::optional<std::size_t> column(std::string_view name) const {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
      }
      return std::nullopt;
    }
  };

  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::size_t> meta_lines;
  Table projects;
  Table votes;
  bool has_meta = false, has_projects = false, has_votes = false;

  std::optional<std::string> meta_value(std::string_view key) const {
    for (const auto& [k, v] : meta) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
  std::size_t meta_line(std::string_view key) const {
    for (std::size_t i = 0; i < meta.size(); ++i) {
      if (meta[i].first == key) return meta_lines[i];
    }
    return 0;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_row(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && trim(field).empty() && !was_quoted) {
      field.clear();
      quoted = was_quoted = true;
    } else if (c == ';') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(ParseErrorKind::kMalformedRow, line_no, "unterminated quote");
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

inline std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    std::size_t comma = cell.find(',', start);
    if (comma == std::string_view::npos) comma = cell.size();
    auto item = trim(cell.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline Money parse_amount(const std::string& text, std::size_t line, const std::string& what) {
  Rational r;
  if (!parse_rational(text, r)) {
    throw ParseError(ParseErrorKind::kBadNumber, line, what + " '" + text + "' is not a number");
  }
  if (sgn(r) <= 0) throw ParseError(ParseErrorKind::kNonPositive, line, what + " must be positive");
  return Money(std::move(r));
}

inline std::size_t parse_count(const std::string& text, std::size_t line, const std::string& what) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ParseError(ParseErrorKind::kBadNumber, line, what + " '" + text + "' is not a count");
  }
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    throw ParseError(ParseErrorKind::kBadNumber, line, what + " '" + text + "' is out of range");
  }
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(";\"\n\r") == std::string::npos && trim(s).size() == s.size()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Splits a file into its three sections. Only the layout is checked here.
inline PabulibDocument parse_document(std::string_view text) {
  PabulibDocument doc;
  enum class Section { kNone, kMeta, kProjects, kVotes } section = Section::kNone;
  bool expect_header = false;
  PabulibDocument::Table* table = nullptr;

  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto bare = detail::trim(line);
    if (bare.empty()) continue;

    std::string upper(bare);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "META" || upper == "PROJECTS" || upper == "VOTES") {
      const Section next = upper == "META" ? Section::kMeta
                           : upper == "PROJECTS" ? Section::kProjects : Section::kVotes;
      if (static_cast<int>(next) <= static_cast<int>(section)) {
        throw ParseError(ParseErrorKind::kSectionOrder, line_no, "section " + upper + " out of order or repeated");
      }
      if (next == Section::kProjects && !doc.has_meta) {
        throw ParseError(ParseErrorKind::kMissingSection, line_no, "PROJECTS before any META section");
      }
      if (next == Section::kVotes && !doc.has_projects) {
        throw ParseError(ParseErrorKind::kMissingSection, line_no, "VOTES before any PROJECTS section");
      }
      section = next;
      expect_header = true;
      switch (next) {
        case Section::kMeta: doc.has_meta = true; table = nullptr; break;
        case Section::kProjects: doc.has_projects = true; table = &doc.projects; break;
        default: doc.has_votes = true; table = &doc.votes; break;
      }
      continue;
    }

    if (section == Section::kNone) {
      throw ParseError(ParseErrorKind::kMissingSection, line_no, "content before the META section");
    }
    auto fields = detail::split_row(line, line_no);
    if (expect_header) {
      expect_header = false;
      if (section == Section::kMeta) {
        if (fields.size() == 2 && detail::lower(fields[0]) == "key" && detail::lower(fields[1]) == "value") continue;
        throw ParseError(ParseErrorKind::kMissingColumn, line_no, "META header must be 'key;value'");
      }
      for (auto& f : fields) f = detail::lower(f);
      table->columns = std::move(fields);
      table->header_line = line_no;
      continue;
    }
    if (section == Section::kMeta) {
      if (fields.size() < 2) throw ParseError(ParseErrorKind::kMalformedRow, line_no, "META row needs key;value");
      std::string value = fields[1];
      for (std::size_t f = 2; f < fields.size(); ++f) value += ";" + fields[f];
      doc.meta.emplace_back(detail::lower(fields[0]), std::move(value));
      doc.meta_lines.push_back(line_no);
      continue;
    }
    if (fields.size() > table->columns.size()) {
      throw ParseError(ParseErrorKind::kMalformedRow, line_no,
                       "row has " + std::to_string(fields.size()) + " fields but the header has " +
                           std::to_string(table->columns.size()));
    }
    fields.resize(table->columns.size());
    table->rows.push_back(std::move(fields));
    table->lines.push_back(line_no);
  }

  if (!doc.has_meta) throw ParseError(ParseErrorKind::kMissingSection, 0, "no META section");
  if (!doc.has_projects) throw ParseError(ParseErrorKind::kMissingSection, 0, "no PROJECTS section");
  if (!doc.has_votes) throw ParseError(ParseErrorKind::kMissingSection, 0, "no VOTES section");
  if (doc.projects.columns.empty()) throw ParseError(ParseErrorKind::kMissingColumn, 0, "PROJECTS has no header row");
  if (doc.votes.columns.empty()) throw ParseError(ParseErrorKind::kMissingColumn, 0, "VOTES has no header row");
  return doc;
}

struct ParseOptions {
  /// Instance id used when META carries no "id" key.
  std::string default_id;
  /// Drop projects without a cost (and strike them from ballots) instead of failing.
  bool drop_projects_without_cost = false;
};

/// Builds the model from a document, checking every consistency rule.
inline std::pair<Instance, Profile> build_model(const PabulibDocument& doc, const ParseOptions& options = {}) {
  using K = ParseErrorKind;
  for (const char* key : {"budget", "num_projects", "num_votes", "vote_type"}) {
    if (!doc.meta_value(key)) throw ParseError(K::kMissingMetaKey, 0, std::string("META lacks '") + key + "'");
  }
  const std::string vote_type = detail::lower(*doc.meta_value("vote_type"));
  if (vote_type != "approval" && vote_type != "choose-1") {
    throw ParseError(K::kUnsupportedVoteType, doc.meta_line("vote_type"),
                     "only approval ballots are supported, got '" + vote_type + "'");
  }
  const Money budget = detail::parse_amount(*doc.meta_value("budget"), doc.meta_line("budget"), "budget");
  const std::size_t num_projects =
      detail::parse_count(*doc.meta_value("num_projects"), doc.meta_line("num_projects"), "num_projects");
  const std::size_t num_votes =
      detail::parse_count(*doc.meta_value("num_votes"), doc.meta_line("num_votes"), "num_votes");

  const auto& pt = doc.projects;
  const auto id_col = pt.column("project_id");
  const auto cost_col = pt.column("cost");
  if (!id_col) throw ParseError(K::kMissingColumn, pt.header_line, "PROJECTS lacks a project_id column");
  if (!cost_col) throw ParseError(K::kMissingCost, pt.header_line, "PROJECTS lacks a cost column");
  const auto name_col = pt.column("name");
  auto category_col = pt.column("category");
  if (!category_col) category_col = pt.column("categories");

  if (num_projects != pt.rows.size()) {
    throw ParseError(K::kCountMismatch, doc.meta_line("num_projects"),
                     "num_projects is " + std::to_string(num_projects) + " but PROJECTS has " +
                         std::to_string(pt.rows.size()) + " rows");
  }

  std::vector<Project> projects;
  std::set<std::string> ids, dropped;
  for (std::size_t r = 0; r < pt.rows.size(); ++r) {
    const auto& row = pt.rows[r];
    const std::size_t line = pt.lines[r];
    const std::string& id = row[*id_col];
    if (id.empty()) throw ParseError(K::kMalformedRow, line, "empty project_id");
    if (!ids.insert(id).second) throw ParseError(K::kDuplicateId, line, "project id '" + id + "' repeated");
    if (row[*cost_col].empty()) {
      if (options.drop_projects_without_cost) {
        dropped.insert(id);
        continue;
      }
      throw ParseError(K::kMissingCost, line, "project '" + id + "' has no cost");
    }
    Project p;
    p.id = id;
    p.cost = detail::parse_amount(row[*cost_col], line, "cost of project '" + id + "'");
    if (name_col) p.name = row[*name_col];
    if (category_col) {
      for (auto& c : detail::split_list(row[*category_col])) p.categories.insert(std::move(c));
    }
    for (std::size_t c = 0; c < pt.columns.size(); ++c) {
      if (c == *id_col || c == *cost_col || (name_col && c == *name_col) ||
          (category_col && c == *category_col) || row[c].empty()) {
        continue;
      }
      p.extra[pt.columns[c]] = row[c];
    }
    projects.push_back(std::move(p));
  }
  if (projects.empty()) throw ParseError(K::kMissingSection, pt.header_line, "no projects with a cost");

  const auto& vt = doc.votes;
  const auto voter_col = vt.column("voter_id");
  const auto vote_col = vt.column("vote");
  if (!voter_col) throw ParseError(K::kMissingColumn, vt.header_line, "VOTES lacks a voter_id column");
  if (!vote_col) throw ParseError(K::kMissingColumn, vt.header_line, "VOTES lacks a vote column");
  if (num_votes != vt.rows.size()) {
    throw ParseError(K::kCountMismatch, doc.meta_line("num_votes"),
                     "num_votes is " + std::to_string(num_votes) + " but VOTES has " +
                         std::to_string(vt.rows.size()) + " rows");
  }
  std::vector<ApprovalBallot> ballots;
  ballots.reserve(vt.rows.size());
  std::set<std::string> voters;
  for (std::size_t r = 0; r < vt.rows.size(); ++r) {
    const auto& row = vt.rows[r];
    const std::size_t line = vt.lines[r];
    ApprovalBallot b;
    b.voter_id = row[*voter_col];
    if (b.voter_id.empty()) throw ParseError(K::kMalformedRow, line, "empty voter_id");
    if (!voters.insert(b.voter_id).second) {
      throw ParseError(K::kDuplicateId, line, "voter id '" + b.voter_id + "' repeated");
    }
    for (auto& pid : detail::split_list(row[*vote_col])) {
      if (!ids.count(pid)) {
        throw ParseError(K::kUnknownProject, line, "vote for unknown project '" + pid + "'");
      }
      if (!dropped.count(pid)) b.approved.insert(std::move(pid));
    }
    for (std::size_t c = 0; c < vt.columns.size(); ++c) {
      if (c == *voter_col || c == *vote_col || row[c].empty()) continue;
      b.extra[vt.columns[c]] = row[c];
    }
    ballots.push_back(std::move(b));
  }

  StringMap meta;
  for (const auto& [k, v] : doc.meta) meta[k] = v;
  if (!meta.count("id") && !options.default_id.empty()) meta["id"] = options.default_id;
  try {
    Instance instance(std::move(projects), budget, std::move(meta));
    Profile profile(std::move(ballots));
    return {std::move(instance), std::move(profile)};
  } catch (const StructuralError& e) {
    throw ParseError(K::kMalformedRow, 0, e.what());
  }
}

inline std::pair<Instance, Profile> parse_pabulib(std::string_view text, const ParseOptions& options = {}) {
  return build_model(parse_document(text), options);
}

/// Serialises a model as a PaBuLib file. With an allocation, a `selected`
/// project column holds 1 for selected projects and 0 otherwise.
inline std::string write_pabulib(const Instance& instance, const Profile& profile,
                                 const Allocation* allocation = nullptr) {
  using detail::quote_field;
  std::ostringstream os;
  StringMap meta = instance.meta();
  meta["budget"] = instance.budget_limit().str();
  meta["num_projects"] = std::to_string(instance.size());
  meta["num_votes"] = std::to_string(profile.size());
  if (!meta.count("vote_type")) meta["vote_type"] = "approval";
  os << "META\nkey;value\n";
  for (const auto& [k, v] : meta) os << quote_field(k) << ';' << quote_field(v) << '\n';

  std::set<std::string> project_extra;
  for (const auto& p : instance.projects()) {
    for (const auto& [k, v] : p.extra) project_extra.insert(k);
  }
  if (allocation) project_extra.erase("selected");
  os << "PROJECTS\nproject_id;cost;name;category";
  for (const auto& k : project_extra) os << ';' << quote_field(k);
  if (allocation) os << ";selected";
  os << '\n';
  for (const auto& p : instance.projects()) {
    std::string cats;
    for (const auto& c : p.categories) cats += (cats.empty() ? "" : ",") + c;
    os << quote_field(p.id) << ';' << p.cost.str() << ';' << quote_field(p.name) << ';' << quote_field(cats);
    for (const auto& k : project_extra) {
      auto it = p.extra.find(k);
      os << ';' << (it == p.extra.end() ? std::string{} : quote_field(it->second));
    }
    if (allocation) os << ';' << (allocation->contains(p.id) ? '1' : '0');
    os << '\n';
  }

  std::set<std::string> vote_extra;
  for (const auto& b : profile.ballots()) {
    for (const auto& [k, v] : b.extra) vote_extra.insert(k);
  }
  os << "VOTES\nvoter_id;vote";
  for (const auto& k : vote_extra) os << ';' << quote_field(k);
  os << '\n';
  for (const auto& b : profile.ballots()) {
    std::string vote;
    for (const auto& id : b.approved) vote += (vote.empty() ? "" : ",") + id;
    os << quote_field(b.voter_id) << ';' << quote_field(vote);
    for (const auto& k : vote_extra) {
      auto it = b.extra.find(k);
      os << ';' << (it == b.extra.end() ? std::string{} : quote_field(it->second));
    }
    os << '\n';
  }
  return os.str();
}

struct IngestFilter {
  std::size_t min_voters = 100;
  std::size_t min_projects = 10;
  bool require_costs = true;
  bool require_votes = true;

  static IngestFilter none() { return {0, 0, true, true}; }
};

struct Election {
  std::string file;
  Instance instance;
  Profile profile;

  std::string id() const { return instance.id(); }
};

struct SkippedFile {
  std::string file;
  std::string reason;
};

struct IngestResult {
  std::vector<Election> accepted;  // sorted by instance id
  std::vector<SkippedFile> skipped;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses one file under the filter. Returns the election or the skip reason.
inline std::variant<Election, SkippedFile> ingest_file(const std::filesystem::path& path,
                                                       const IngestFilter& filter) {
  const std::string name = path.filename().string();
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    return SkippedFile{name, std::string("unreadable: ") + e.what()};
  }
  ParseOptions options;
  options.default_id = path.stem().string();
  options.drop_projects_without_cost = !filter.require_costs;
  try {
    auto [instance, profile] = parse_pabulib(text, options);
    if (filter.require_votes && profile.empty()) return SkippedFile{name, "missing votes"};
    if (profile.size() < filter.min_voters) {
      return SkippedFile{name, "too few voters (" + std::to_string(profile.size()) + " < " +
                                   std::to_string(filter.min_voters) + ")"};
    }
    if (instance.size() < filter.min_projects) {
      return SkippedFile{name, "too few projects (" + std::to_string(instance.size()) + " < " +
                                   std::to_string(filter.min_projects) + ")"};
    }
    return Election{name, std::move(instance), std::move(profile)};
  } catch (const ParseError& e) {
    if (e.kind() == ParseErrorKind::kMissingCost) return SkippedFile{name, "missing cost"};
    if (e.kind() == ParseErrorKind::kMissingSection && std::string_view(e.what()).find("VOTES") != std::string_view::npos) {
      return SkippedFile{name, "missing votes"};
    }
    return SkippedFile{name, std::string("parse error: ") + e.what()};
  }
}

/// Reads every *.pb file in `dir`. Failures are reported, never fatal.
inline IngestResult ingest_directory(const std::filesystem::path& dir, const IngestFilter& filter = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw std::runtime_error("not a readable directory: " + dir.string());
  std::vector<fs::path> files;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    if (detail::lower(it->path().extension().string()) == ".pb") files.push_back(it->path());
  }
  if (ec) throw std::runtime_error("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  IngestResult result;
  for (const auto& f : files) {
    auto r = ingest_file(f, filter);
    if (auto* e = std::get_if<Election>(&r)) result.accepted.push_back(std::move(*e));
    else result.skipped.push_back(std::get<SkippedFile>(std::move(r)));
  }
  std::stable_sort(result.accepted.begin(), result.accepted.end(),
                   [](const Election& a, const Election& b) { return a.id() < b.id(); });
  return result;
}

/// One JSON object per line: {"file": ..., "reason": ...}.
inline std::string skip_report_jsonl(const std::vector<SkippedFile>& skipped) {
  std::string out;
  for (const auto& s : skipped) {
    nlohmann::ordered_json j;
    j["file"] = s.file;
    j["reason"] = s.reason;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace pbeval
