#pragma once

#include "pbeval/money.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pbeval {

/// Thrown when a model invariant is violated: duplicate ids, unknown project
/// references, non-positive costs, infeasible allocations.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using ProjectIds = std::set<std::string>;
using StringMap = std::map<std::string, std::string>;

struct Project {
  std::string id;
  Money cost;
  std::string name;
  std::set<std::string> categories;
  StringMap extra;

  friend bool operator==(const Project&, const Project&) = default;
};

/// A participatory budgeting instance: projects with costs and a budget limit.
class Instance {
 public:
  Instance(std::vector<Project> projects, Money budget_limit, StringMap meta = {})
      : projects_(std::move(projects)), budget_(std::move(budget_limit)), meta_(std::move(meta)) {
    if (projects_.empty()) throw StructuralError("instance has no projects");
    if (budget_.is_zero()) throw StructuralError("budget limit must be positive");
    index_.reserve(projects_.size());
    for (std::size_t i = 0; i < projects_.size(); ++i) {
      const Project& p = projects_[i];
      if (p.cost.is_zero()) throw StructuralError("project '" + p.id + "' has zero cost");
      if (!index_.emplace(p.id, i).second) {
        throw StructuralError("duplicate project id '" + p.id + "'");
      }
    }
  }

  const std::vector<Project>& projects() const { return projects_; }
  std::size_t size() const { return projects_.size(); }
  const Project& project(std::size_t i) const { return projects_.at(i); }
  const Money& budget_limit() const { return budget_; }
  const StringMap& meta() const { return meta_; }

  std::string meta_value(const std::string& key) const {
    auto it = meta_.find(key);
    return it == meta_.end() ? std::string{} : it->second;
  }
  std::string id() const { return meta_value("id"); }

  std::optional<std::size_t> index_of(const std::string& project_id) const {
    auto it = index_.find(project_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const Project& project(const std::string& project_id) const {
    auto i = index_of(project_id);
    if (!i) throw StructuralError("unknown project id '" + project_id + "'");
    return projects_[*i];
  }
  bool contains(const std::string& project_id) const { return index_.count(project_id) != 0; }

  /// All category labels used by any project.
  std::set<std::string> categories() const {
    std::set<std::string> out;
    for (const auto& p : projects_) out.insert(p.categories.begin(), p.categories.end());
    return out;
  }

  Money total_project_cost() const {
    Money sum;
    for (const auto& p : projects_) sum += p.cost;
    return sum;
  }

  Instance with_budget(Money budget) const { return Instance(projects_, std::move(budget), meta_); }

  /// The instance restricted to projects not in `removed`, with a new budget.
  /// Returns nullopt when nothing would be left to decide.
  std::optional<Instance> without(const ProjectIds& removed, Money budget) const {
    if (budget.is_zero()) return std::nullopt;
    std::vector<Project> kept;
    for (const auto& p : projects_) {
      if (!removed.count(p.id)) kept.push_back(p);
    }
    if (kept.empty()) return std::nullopt;
    return Instance(std::move(kept), std::move(budget), meta_);
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.budget_ == b.budget_ && a.projects_ == b.projects_ && a.meta_ == b.meta_;
  }

 private:
  std::vector<Project> projects_;
  Money budget_;
  StringMap meta_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ApprovalBallot {
  std::string voter_id;
  ProjectIds approved;
  StringMap extra;

  friend bool operator==(const ApprovalBallot&, const ApprovalBallot&) = default;
};

/// Ordered approval ballots with unique voter ids. An empty profile is
/// representable; the rules treat it as the degenerate no-voter case.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<ApprovalBallot> ballots) : ballots_(std::move(ballots)) {
    std::set<std::string_view> seen;
    for (const auto& b : ballots_) {
      if (!seen.insert(b.voter_id).second) {
        throw StructuralError("duplicate voter id '" + b.voter_id + "'");
      }
    }
  }
  Profile(std::vector<ApprovalBallot> ballots, const Instance& instance)
      : Profile(std::move(ballots)) {
    validate_against(instance);
  }

  void validate_against(const Instance& instance) const {
    for (const auto& b : ballots_) {
      for (const auto& id : b.approved) {
        if (!instance.contains(id)) {
          throw StructuralError("voter '" + b.voter_id + "' approves unknown project '" + id + "'");
        }
      }
    }
  }

  const std::vector<ApprovalBallot>& ballots() const { return ballots_; }
  std::size_t size() const { return ballots_.size(); }
  bool empty() const { return ballots_.empty(); }
  const ApprovalBallot& operator[](std::size_t i) const { return ballots_[i]; }

  /// The profile with the given projects struck from every ballot.
  Profile without(const ProjectIds& removed) const {
    std::vector<ApprovalBallot> out = ballots_;
    for (auto& b : out) {
      for (const auto& id : removed) b.approved.erase(id);
    }
    Profile p;
    p.ballots_ = std::move(out);
    return p;
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  std::vector<ApprovalBallot> ballots_;
};

/// Sum of the costs of the given projects.
inline Money total_cost(const ProjectIds& project_set, const Instance& instance) {
  Money sum;
  for (const auto& id : project_set) sum += instance.project(id).cost;
  return sum;
}

/// A feasible set of selected projects. Feasibility is checked on construction.
class Allocation {
 public:
  Allocation() = default;
  Allocation(const Instance& instance, ProjectIds selected)
      : selected_(std::move(selected)), total_(pbeval::total_cost(selected_, instance)) {
    if (total_ > instance.budget_limit()) {
      throw StructuralError("allocation costs " + total_.str() + " but the budget limit is " +
                            instance.budget_limit().str());
    }
  }

  const ProjectIds& selected() const { return selected_; }
  const Money& total_cost() const { return total_; }
  std::size_t size() const { return selected_.size(); }
  bool empty() const { return selected_.empty(); }
  bool contains(const std::string& id) const { return selected_.count(id) != 0; }

  friend bool operator==(const Allocation& a, const Allocation& b) {
    return a.selected_ == b.selected_;
  }

 private:
  ProjectIds selected_;
  Money total_;
};

inline Money leftover(const Allocation& allocation, const Instance& instance) {
  return instance.budget_limit() - allocation.total_cost();
}

/// True iff no unselected project fits into the remaining budget.
inline bool is_complete(const Allocation& allocation, const Instance& instance) {
  const Money remaining = leftover(allocation, instance);
  for (const auto& p : instance.projects()) {
    if (!allocation.contains(p.id) && p.cost <= remaining) return false;
  }
  return true;
}

/// Ids of the voters approving the project.
inline std::set<std::string> approvers(const std::string& project_id, const Profile& profile,
                                      const Instance& instance) {
  if (!instance.contains(project_id)) {
    throw StructuralError("unknown project id '" + project_id + "'");
  }
  std::set<std::string> out;
  for (const auto& b : profile.ballots()) {
    if (b.approved.count(project_id)) out.insert(b.voter_id);
  }
  return out;
}

/// Ballots as project indices, the form the rules iterate over.
struct IndexedProfile {
  std::vector<std::vector<std::uint32_t>> ballots;  // sorted project indices per voter
  std::vector<std::uint32_t> approval_counts;       // per project

  IndexedProfile(const Instance& instance, const Profile& profile)
      : ballots(profile.size()), approval_counts(instance.size(), 0) {
    for (std::size_t v = 0; v < profile.size(); ++v) {
      auto& out = ballots[v];
      out.reserve(profile[v].approved.size());
      for (const auto& id : profile[v].approved) {
        auto idx = instance.index_of(id);
        if (!idx) {
          throw StructuralError("voter '" + profile[v].voter_id + "' approves unknown project '" +
                                id + "'");
        }
        out.push_back(static_cast<std::uint32_t>(*idx));
        ++approval_counts[*idx];
      }
      std::sort(out.begin(), out.end());
    }
  }
};

}  // namespace pbeval
