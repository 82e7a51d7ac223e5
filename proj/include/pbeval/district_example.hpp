#pragma once

// Synthetic town of four districts whose voters approve exactly their own
// district's projects.

#include "pbeval/model.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace pbeval {

inline constexpr std::array<const char*, 4> kDistrictNames{"North", "East", "South", "West"};

/// Project costs as fractions of the budget. With `spread` > 0 each cost is
/// the base fraction scaled by a seeded factor in [1 - spread, 1 + spread],
/// quantised to 1/1000 steps.
struct CostModel {
  Rational fraction{1, 3};
  Rational spread{0};
  std::uint64_t seed = 1;
};

inline std::pair<Instance, Profile> build_district_example(const std::array<long, 4>& populations,
                                                           const Money& budget,
                                                           int projects_per_district,
                                                           const CostModel& cost_model = {}) {
  for (long p : populations) {
    if (p <= 0) throw std::invalid_argument("district populations must be positive");
  }
  if (projects_per_district <= 0) throw std::invalid_argument("need at least one project per district");
  if (budget.is_zero()) throw std::invalid_argument("budget must be positive");

  std::mt19937_64 rng(cost_model.seed);
  std::vector<Project> projects;
  for (std::size_t d = 0; d < 4; ++d) {
    for (int k = 0; k < projects_per_district; ++k) {
      Rational factor = 1;
      if (sgn(cost_model.spread) != 0) {
        const long step = static_cast<long>(rng() % 2001) - 1000;  // [-1000, 1000]
        factor += cost_model.spread * Rational(step) / 1000;
      }
      Project p;
      p.id = std::string(kDistrictNames[d]) + "-" + std::to_string(k + 1);
      p.cost = budget * Rational(cost_model.fraction * factor);
      p.categories = {kDistrictNames[d]};
      projects.push_back(std::move(p));
    }
  }

  std::vector<ApprovalBallot> ballots;
  for (std::size_t d = 0; d < 4; ++d) {
    ProjectIds own;
    for (int k = 0; k < projects_per_district; ++k) {
      own.insert(std::string(kDistrictNames[d]) + "-" + std::to_string(k + 1));
    }
    for (long v = 0; v < populations[d]; ++v) {
      ApprovalBallot b;
      b.voter_id = std::string(kDistrictNames[d]) + "#" + std::to_string(v + 1);
      b.approved = own;
      b.extra["district"] = kDistrictNames[d];
      ballots.push_back(std::move(b));
    }
  }
  Instance instance(std::move(projects), budget, {{"id", "four-districts"}, {"description", "four-district town"}});
  Profile profile(std::move(ballots), instance);
  return {std::move(instance), std::move(profile)};
}

}  // namespace pbeval
