#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "pforge/json_io.hpp"
#include "pforge/mechanisms.hpp"

using namespace pforge;

namespace {

Allocation alloc(std::initializer_list<double> v) { return make_allocation(std::vector<double>(v)); }

}  // namespace

TEST_CASE("mean allocation") {
  const Profile p = make_profile({alloc({1.0, 0.0}), alloc({0.5, 0.5})});
  const Allocation a = mean_allocation(p);
  CHECK(a[0] == doctest::Approx(0.75));
  CHECK(a[1] == doctest::Approx(0.25));
}

TEST_CASE("registry contents") {
  const auto& regs = registry_list();
  CHECK(regs.size() == 14);
  for (const char* id :
       {"mean", "greedymax", "greedymin", "max_utilitarian_welfare", "independent_markets",
        "ladder", "piecewise_uniform", "cutoff_greedymax", "cutoff_im", "cutoff_ladder",
        "cutoff_muw", "cutoff_piecewise", "votecut_greedymin", "uvcgm"}) {
    CHECK_NOTHROW(registry_find(id));
  }
  CHECK_THROWS_AS(registry_find("nope"), UnknownMechanism);
  CHECK(registry_find("cutoff_muw").known_untruthful_constant_tau);
  CHECK(registry_find("cutoff_piecewise").known_untruthful_constant_tau);
  CHECK_FALSE(registry_find("cutoff_greedymax").known_untruthful_constant_tau);
  CHECK(registry_find("uvcgm").require_n == 2);
  CHECK(registry_find("uvcgm").require_m == 3);
}

TEST_CASE("apply_mechanism examples") {
  SUBCASE("cutoff greedymax on a near-vertex profile") {
    // n-1 vertex votes plus one 0.75-peaked vote; greedymax follows the
    // minority vote, the aggregate cutoff then caps it at 0.5.
    const Profile p = make_profile({alloc({1.0, 0.0, 0.0}), alloc({0.75, 0.25, 0.0})});
    const Allocation a = apply_mechanism(registry_find("cutoff_greedymax"), p);
    CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(a[1] == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(a[2] == doctest::Approx(0.125).epsilon(1e-9));
  }
  SUBCASE("uvcgm on the concentrated pair") {
    const Profile p = make_profile({alloc({0.84, 0.16, 0.0}), alloc({0.7, 0.3, 0.0})});
    const Allocation a = apply_mechanism(registry_find("uvcgm"), p);
    CHECK(a[0] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(a[1] == doctest::Approx(0.18).epsilon(1e-9));
    CHECK(a[2] == doctest::Approx(0.12).epsilon(1e-9));
  }
  SUBCASE("votecut greedymin truncates a unanimous extreme report") {
    const Profile p = make_profile({alloc({0.9, 0.1, 0.0}), alloc({0.9, 0.1, 0.0})});
    const Allocation a = apply_mechanism(registry_find("votecut_greedymin"), p);
    CHECK(a[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(a[1] == doctest::Approx(0.15).epsilon(1e-9));
    CHECK(a[2] == doctest::Approx(0.05).epsilon(1e-9));
  }
  SUBCASE("dimension constraints are enforced") {
    const Profile three_voters = make_profile(
        {alloc({1.0, 0.0, 0.0}), alloc({0.0, 1.0, 0.0}), alloc({0.0, 0.0, 1.0})});
    CHECK_THROWS_AS(apply_mechanism(registry_find("uvcgm"), three_voters), DimensionConstraint);
    const Profile wrong_m = make_profile({alloc({1.0, 0.0}), alloc({0.0, 1.0})});
    CHECK_THROWS_AS(apply_mechanism(registry_find("uvcgm"), wrong_m), DimensionConstraint);
  }
}

TEST_CASE("unanimity behavior per mechanism") {
  const Allocation extreme = alloc({0.9, 0.1, 0.0});
  for (const char* id : {"mean", "greedymax", "greedymin", "max_utilitarian_welfare",
                         "independent_markets", "ladder", "piecewise_uniform", "uvcgm"}) {
    const MechanismSpec spec = registry_find(id);
    std::vector<Allocation> votes(2, extreme);
    const Allocation a = apply_mechanism(spec, make_profile(std::move(votes)));
    CHECK_MESSAGE(linf_distance(a, extreme) <= 1e-9, id);
  }
  // Cutoff mechanisms deliberately break unanimity on extreme reports.
  for (const char* id : {"cutoff_greedymax", "votecut_greedymin"}) {
    const MechanismSpec spec = registry_find(id);
    std::vector<Allocation> votes(2, extreme);
    const Allocation a = apply_mechanism(spec, make_profile(std::move(votes)));
    CHECK_MESSAGE(linf_distance(a, extreme) > 1e-3, id);
  }
}

TEST_CASE("mechanism JSON round trip") {
  for (const MechanismSpec& spec : registry_list()) {
    const MechanismSpec back = mechanism_from_json(mechanism_to_json(spec));
    CHECK(back.id == spec.id);
    CHECK(back.base == spec.base);
    CHECK(back.phantom_id == spec.phantom_id);
    CHECK(back.cutoff == spec.cutoff);
    CHECK(back.threshold.kind == spec.threshold.kind);
    if (spec.threshold.kind == ThresholdFn::Kind::Constant) {
      CHECK(back.threshold.tau == doctest::Approx(spec.threshold.tau));
    }
    CHECK(back.require_n == spec.require_n);
    CHECK(back.require_m == spec.require_m);
    // Round-tripped specs produce identical outputs.
    const int n = spec.require_n.value_or(2);
    const int m = spec.require_m.value_or(3);
    const Profile p = lower_bound_profile(n, m);
    CHECK(linf_distance(apply_mechanism(spec, p), apply_mechanism(back, p)) <= 1e-12);
  }
}

TEST_CASE("custom mechanism from JSON") {
  const auto j = nlohmann::json::parse(R"({
    "base": {"phantom": "ladder"},
    "cutoff": {"kind": "aggregate", "threshold": {"kind": "constant", "tau": 0.6}}
  })");
  const MechanismSpec spec = mechanism_from_json(j);
  const Profile p = make_profile({alloc({1.0, 0.0, 0.0}), alloc({0.9, 0.1, 0.0})});
  const Allocation a = apply_mechanism(spec, p);
  double peak = 0.0;
  for (double x : a.values()) peak = std::max(peak, x);
  CHECK(peak <= 0.6 + 1e-9);
}
