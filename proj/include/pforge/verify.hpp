#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pforge/core.hpp"
#include "pforge/mechanisms.hpp"

namespace pforge {

struct UnknownScenario : std::runtime_error {
  explicit UnknownScenario(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic RNG: same seed, same sequence, on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  int uniform_int(int lo, int hi);  // inclusive bounds
  Allocation random_allocation(int m);
  Profile random_profile(int n, int m);
  std::vector<int> random_permutation(int k);
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

inline constexpr std::uint64_t kDefaultSeed = 1729;

// ---- axiom checks ----

bool check_anonymity(const MechanismSpec& spec, const Profile& p, int trials,
                     std::uint64_t seed = kDefaultSeed, const Tolerance& tol = {});
bool check_neutrality(const MechanismSpec& spec, const Profile& p, int trials,
                      std::uint64_t seed = kDefaultSeed, const Tolerance& tol = {});
bool check_unanimity(const MechanismSpec& spec, const Allocation& v, int n = 2,
                     const Tolerance& tol = {});

struct ContinuityReport {
  std::vector<double> deltas;
  std::vector<double> max_ratio;  // ||dA||_1 / ||dP||_1 per scale
  bool divergence_flag = false;
};

ContinuityReport continuity_probe(const MechanismSpec& spec, const Profile& p,
                                  const std::vector<double>& deltas, int trials,
                                  std::uint64_t seed = kDefaultSeed, const Tolerance& tol = {});

// ---- truthfulness search ----

struct ManipulationConfig {
  int grid_resolution = 0;    // 0 = auto: 50 for m <= 3, 20 for m = 4
  int refinement_rounds = 3;  // local step search, step shrinks 5x per round
  int random_candidates = 600;  // used when m > 4
};

struct SearchStats {
  long long candidates = 0;
  int refinement_rounds = 0;
};

struct ManipulationResult {
  int voter = 0;
  double truthful_disutility = 0.0;
  Allocation best_misreport;
  double best_disutility = 0.0;
  double gain = 0.0;  // truthful - best; > eps_gain flags a violation
  SearchStats stats;
};

// Falsifier: a small gain means "no violation found", never "truthful".
ManipulationResult manipulation_search(const MechanismSpec& spec, const Profile& p, int voter,
                                       const ManipulationConfig& cfg = {},
                                       const Tolerance& tol = {},
                                       std::uint64_t seed = kDefaultSeed);

// Evaluates one specific misreport for the given voter.
double misreport_disutility(const MechanismSpec& spec, const Profile& p, int voter,
                            const Allocation& misreport, const Tolerance& tol = {});

// ---- fairness ----

struct FairnessResult {
  double l1 = 0.0;
  double linf = 0.0;
  std::string mechanism;
  std::string profile_digest;
};

FairnessResult fairness(const MechanismSpec& spec, const Profile& p, const Tolerance& tol = {});
FairnessResult worst_case_fairness(const MechanismSpec& spec, int n, int m, int trials,
                                   std::uint64_t seed = kDefaultSeed, const Tolerance& tol = {});

// ---- phantom representability ----

struct RepresentabilityResult {
  bool feasible = false;
  std::optional<std::vector<double>> witness;  // q_0 >= ... >= q_n
  std::vector<double> candidate_set;
  std::string blocking_explanation;
};

// Decides whether ordered phantom positions exist whose per-alternative
// medians with the votes reproduce a.
RepresentabilityResult phantom_representable(const Profile& p, const Allocation& a,
                                             const Tolerance& tol = {});

struct ConsistencyResult {
  bool consistent = false;
  std::string explanation;
};

// True iff feasible phantom vectors for the two (profile, allocation) pairs
// exist that are componentwise comparable. A false result refutes a common
// monotone phantom family; a true result only means "not refuted".
ConsistencyResult phantom_family_consistent(const Profile& p1, const Allocation& a1,
                                            const Profile& p2, const Allocation& a2,
                                            const Tolerance& tol = {});

// ---- scenario registry ----

struct ScenarioResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<std::string> scenario_names();
ScenarioResult run_scenario(const std::string& name, std::uint64_t seed = kDefaultSeed,
                            const Tolerance& tol = {});

std::string profile_digest(const Profile& p);

}  // namespace pforge
