#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pforge/core.hpp"
#include "pforge/cutoffs.hpp"
#include "pforge/phantoms.hpp"

namespace pforge {

struct DimensionConstraint : std::runtime_error {
  explicit DimensionConstraint(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownMechanism : std::runtime_error {
  explicit UnknownMechanism(const std::string& what) : std::runtime_error(what) {}
};

enum class BaseKind { Mean, Phantom, GreedyDirectMax, GreedyDirectMin };
enum class CutoffMode { None, Aggregate, PerVote, UnanimousPair };

// One aggregation rule: optional report cutoff, a base mechanism, and an
// optional aggregate cutoff.
struct MechanismSpec {
  std::string id;
  BaseKind base = BaseKind::Mean;
  std::string phantom_id;  // Phantom base only
  CutoffMode cutoff = CutoffMode::None;
  ThresholdFn threshold;   // Aggregate / PerVote only
  std::optional<int> require_n;
  std::optional<int> require_m;
  bool known_untruthful_constant_tau = false;
  std::string note;
};

Allocation mean_allocation(const Profile& p);

// Pipeline: report cutoff (per-vote or unanimous pairwise) -> base -> aggregate cutoff.
Allocation apply_mechanism(const MechanismSpec& spec, const Profile& p, const Tolerance& tol = {});

const std::vector<MechanismSpec>& registry_list();
MechanismSpec registry_find(const std::string& id);

}  // namespace pforge
