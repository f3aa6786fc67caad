#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "pforge/verify.hpp"

using namespace pforge;

namespace {

Allocation alloc(std::initializer_list<double> v) { return make_allocation(std::vector<double>(v)); }

}  // namespace

TEST_CASE("rng determinism and validity") {
  Rng a(kDefaultSeed);
  Rng b(kDefaultSeed);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng r(42);
  for (int i = 0; i < 200; ++i) {
    const Allocation x = r.random_allocation(4);
    double sum = 0.0;
    for (double v : x.values()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  const std::vector<int> perm = r.random_permutation(6);
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 6; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("anonymity and neutrality hold for registry mechanisms") {
  Rng r(5);
  for (const char* id : {"mean", "greedymax", "greedymin", "cutoff_greedymax", "cutoff_im"}) {
    const MechanismSpec spec = registry_find(id);
    const Profile p = r.random_profile(3, 3);
    CHECK_MESSAGE(check_anonymity(spec, p, 20), id);
    CHECK_MESSAGE(check_neutrality(spec, p, 20), id);
  }
}

TEST_CASE("unanimity check") {
  CHECK(check_unanimity(registry_find("mean"), alloc({0.5, 0.3, 0.2})));
  CHECK(check_unanimity(registry_find("greedymax"), alloc({0.9, 0.1, 0.0})));
  CHECK_FALSE(check_unanimity(registry_find("votecut_greedymin"), alloc({0.9, 0.1, 0.0})));
}

TEST_CASE("mean is manipulable on the two-voter half-half profile") {
  const Profile p = make_profile({alloc({1.0, 0.0}), alloc({0.5, 0.5})});
  const ManipulationResult r = manipulation_search(registry_find("mean"), p, 1);
  CHECK(r.truthful_disutility == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.best_disutility == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.gain == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.best_misreport[1] == doctest::Approx(1.0));
  // The direct evaluation agrees with the search result.
  CHECK(misreport_disutility(registry_find("mean"), p, 1, alloc({0.0, 1.0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("truthful mechanisms show no gain on spot profiles") {
  Rng r(17);
  for (const char* id : {"greedymax", "cutoff_greedymax", "cutoff_ladder"}) {
    const MechanismSpec spec = registry_find(id);
    for (int trial = 0; trial < 5; ++trial) {
      const Profile p = r.random_profile(1 + trial % 3, 3);
      const int voter = trial % p.n();
      const ManipulationResult res = manipulation_search(spec, p, voter);
      CHECK_MESSAGE(res.gain <= 1e-7, id << " trial " << trial);
    }
  }
}

TEST_CASE("continuity of the mean") {
  Rng r(23);
  const Profile p = r.random_profile(4, 3);
  const ContinuityReport rep =
      continuity_probe(registry_find("mean"), p, {0.1, 0.01, 0.001}, 30);
  CHECK_FALSE(rep.divergence_flag);
  for (double ratio : rep.max_ratio) CHECK(ratio <= 0.25 + 1e-9);  // 1/n for n = 4
}

TEST_CASE("fairness on the center/vertex profiles") {
  const MechanismSpec gmax = registry_find("greedymax");
  const FairnessResult f2 = fairness(gmax, lower_bound_profile(2, 3));
  CHECK(f2.l1 == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(f2.linf == doctest::Approx(1.0 / 3).epsilon(1e-9));
  const FairnessResult f3 = fairness(gmax, lower_bound_profile(3, 3));
  CHECK(f3.l1 == doctest::Approx(4.0 / 9).epsilon(1e-9));
  CHECK(f3.linf == doctest::Approx(2.0 / 9).epsilon(1e-9));
  CHECK(f2.mechanism == "greedymax");
  CHECK_FALSE(f2.profile_digest.empty());
}

TEST_CASE("worst_case_fairness reaches the structural lower bound") {
  const FairnessResult w = worst_case_fairness(registry_find("greedymax"), 2, 3, 30);
  CHECK(w.l1 >= 2.0 / 3 - 1e-9);
  CHECK(w.linf >= 1.0 / 3 - 1e-9);
  CHECK(w.l1 <= 2.0 + 1e-9);
}

TEST_CASE("phantom representability on known cases") {
  SUBCASE("center output is representable") {
    const Profile p = lower_bound_profile(2, 3);
    const RepresentabilityResult r =
        phantom_representable(p, alloc({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK(r.feasible);
    REQUIRE(r.witness.has_value());
    const std::vector<double>& q = *r.witness;
    REQUIRE(q.size() == 3);  // n + 1 phantoms
    for (std::size_t k = 1; k < q.size(); ++k) CHECK(q[k - 1] >= q[k] - 1e-12);
  }
  SUBCASE("cutoff output is not representable") {
    const Profile p = make_profile({alloc({1.0, 0.0, 0.0}), alloc({0.75, 0.25, 0.0})});
    const RepresentabilityResult r = phantom_representable(p, alloc({0.5, 0.375, 0.125}));
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.blocking_explanation.empty());
  }
  SUBCASE("truncated unanimous output is not representable") {
    const Profile p = make_profile({alloc({0.9, 0.1, 0.0}), alloc({0.9, 0.1, 0.0})});
    const RepresentabilityResult r = phantom_representable(p, alloc({0.8, 0.15, 0.05}));
    CHECK_FALSE(r.feasible);
  }
  SUBCASE("moving-phantom outputs are always representable") {
    Rng rng(31);
    for (const char* id : {"greedymax", "greedymin", "ladder", "independent_markets"}) {
      const MechanismSpec spec = registry_find(id);
      for (int trial = 0; trial < 10; ++trial) {
        const Profile p = rng.random_profile(1 + trial % 3, 3);
        const Allocation a = apply_mechanism(spec, p);
        const RepresentabilityResult r = phantom_representable(p, a);
        CHECK_MESSAGE(r.feasible, id << " trial " << trial);
      }
    }
  }
}

TEST_CASE("phantom family consistency") {
  const Profile p1 = make_profile({alloc({0.84, 0.16, 0.0}), alloc({0.7, 0.3, 0.0})});
  const Profile p2 = make_profile({alloc({0.82, 0.18, 0.0}), alloc({0.7, 0.3, 0.0})});
  const Allocation a1 = apply_mechanism(registry_find("uvcgm"), p1);
  const Allocation a2 = apply_mechanism(registry_find("uvcgm"), p2);
  const ConsistencyResult inconsistent = phantom_family_consistent(p1, a1, p2, a2);
  CHECK_FALSE(inconsistent.consistent);
  CHECK_FALSE(inconsistent.explanation.empty());
  // Symmetric in the two pairs.
  CHECK(phantom_family_consistent(p2, a2, p1, a1).consistent == inconsistent.consistent);

  // The same pair twice is trivially consistent.
  CHECK(phantom_family_consistent(p1, a1, p1, a1).consistent);

  // A single phantom family across two profiles is consistent.
  Rng rng(37);
  const Profile q1 = rng.random_profile(2, 3);
  const Profile q2 = rng.random_profile(2, 3);
  const MechanismSpec gmax = registry_find("greedymax");
  const ConsistencyResult ok = phantom_family_consistent(
      q1, apply_mechanism(gmax, q1), q2, apply_mechanism(gmax, q2));
  CHECK(ok.consistent);
}

TEST_CASE("scenario registry") {
  const std::vector<std::string> names = scenario_names();
  CHECK(names.size() == 11);
  CHECK(std::find(names.begin(), names.end(), "mean_not_truthful") != names.end());
  const ScenarioResult r = run_scenario("mean_not_truthful");
  CHECK(r.passed);
  CHECK_THROWS_AS(run_scenario("no_such_scenario"), UnknownScenario);
}

TEST_CASE("profile digest distinguishes profiles") {
  Rng rng(41);
  const Profile p1 = rng.random_profile(2, 3);
  const Profile p2 = rng.random_profile(2, 3);
  CHECK(profile_digest(p1) == profile_digest(p1));
  CHECK(profile_digest(p1) != profile_digest(p2));
}
