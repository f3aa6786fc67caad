#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pforge/cutoffs.hpp"

using namespace pforge;

TEST_CASE("aggregate_cutoff lowers the peak and spreads the surplus") {
  const Allocation a = aggregate_cutoff(make_allocation({0.75, 0.25, 0.0}), 0.5);
  CHECK(a[0] == doctest::Approx(0.5));
  CHECK(a[1] == doctest::Approx(0.375));
  CHECK(a[2] == doctest::Approx(0.125));

  const Allocation b = aggregate_cutoff(make_allocation({0.9, 0.1, 0.0}), 0.8);
  CHECK(b[0] == doctest::Approx(0.8));
  CHECK(b[1] == doctest::Approx(0.15));
  CHECK(b[2] == doctest::Approx(0.05));

  // No coordinate above the threshold: identity.
  const Allocation c = make_allocation({0.4, 0.35, 0.25});
  CHECK(l1_distance(aggregate_cutoff(c, 0.5), c) == doctest::Approx(0.0));

  // Idempotent.
  CHECK(l1_distance(aggregate_cutoff(a, 0.5), a) == doctest::Approx(0.0));

  CHECK_THROWS_AS(aggregate_cutoff(c, 0.4), InvalidThreshold);
  CHECK_THROWS_AS(aggregate_cutoff(c, 1.0), InvalidThreshold);
}

TEST_CASE("vote_cutoff applies per report") {
  const Profile p = make_profile({make_allocation({0.9, 0.1, 0.0}),
                                  make_allocation({0.2, 0.4, 0.4})});
  const Profile q = vote_cutoff(p, 0.8);
  CHECK(q.votes[0][0] == doctest::Approx(0.8));
  CHECK(q.votes[0][1] == doctest::Approx(0.15));
  CHECK(q.votes[0][2] == doctest::Approx(0.05));
  CHECK(l1_distance(q.votes[1], p.votes[1]) == doctest::Approx(0.0));
}

TEST_CASE("slow classification of the built-in families") {
  for (int n = 2; n <= 6; ++n) {
    CHECK(is_slow(builtin_system("greedymax", n)));
    CHECK(is_slow(builtin_system("independent_markets", n)));
    CHECK(is_slow(builtin_system("ladder", n)));
    CHECK_FALSE(is_slow(builtin_system("max_utilitarian_welfare", n)));
    CHECK_FALSE(is_slow(builtin_system("piecewise_uniform", n)));
    // greedymin's second-to-last phantom only leaves zero at the exact time
    // the first phantom reaches one, so the strict overlap clause fails.
    CHECK_FALSE(is_slow(builtin_system("greedymin", n)));
  }
}

TEST_CASE("slow thresholds match the closed forms") {
  for (int n = 2; n <= 6; ++n) {
    for (int m = 3; m <= 6; ++m) {
      const double tau_im = slow_threshold(builtin_system("independent_markets", n), m);
      CHECK(tau_im == doctest::Approx(double(n + m - 2) / (n + m - 1)).epsilon(1e-9));
      const double tau_lad = slow_threshold(builtin_system("ladder", n), m);
      CHECK(tau_lad == doctest::Approx(double(m * n - 1) / (m * n)).epsilon(1e-9));
      const double tau_gm = slow_threshold(builtin_system("greedymax", n), m);
      CHECK(tau_gm == doctest::Approx(double(m - 1) / m).epsilon(1e-9));
      // Cached lookups agree with the direct computation.
      CHECK(slow_threshold_cached("independent_markets", n, m) ==
            doctest::Approx(tau_im).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(slow_threshold(builtin_system("max_utilitarian_welfare", 3), 3), NotSlow);
  CHECK_THROWS_AS(slow_threshold(builtin_system("piecewise_uniform", 3), 3), NotSlow);
}

TEST_CASE("unanimous pairwise cutoff") {
  const Allocation v1 = make_allocation({0.84, 0.16, 0.0});
  const Allocation v2 = make_allocation({0.7, 0.3, 0.0});
  const Allocation c1 = unanimous_vote_cutoff(v1, v2);
  CHECK(c1[0] == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(c1[1] == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(c1[2] == doctest::Approx(0.02).epsilon(1e-12));

  const Allocation w = make_allocation({0.82, 0.18, 0.0});
  const Allocation c2 = unanimous_vote_cutoff(w, v2);
  CHECK(c2[0] == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(c2[1] == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(c2[2] == doctest::Approx(0.01).epsilon(1e-12));

  // Below the hard threshold nothing changes.
  const Allocation mild = make_allocation({0.6, 0.3, 0.1});
  CHECK(l1_distance(unanimous_vote_cutoff(mild, v2), mild) == doctest::Approx(0.0));

  // A partner who agrees on the peak (w_k >= hard) suppresses the cut.
  CHECK(l1_distance(unanimous_vote_cutoff(w, w), w) == doctest::Approx(0.0));

  // A partner far from the peak (w_k <= soft) yields the full cut
  // gamma = v_k - hard.
  const Allocation far = make_allocation({0.0, 0.5, 0.5});
  const Allocation c3 = unanimous_vote_cutoff(v1, far);
  CHECK(c3[0] == doctest::Approx(0.80).epsilon(1e-12));

  CHECK_THROWS_AS(unanimous_vote_cutoff(make_allocation({0.9, 0.1}),
                                        make_allocation({0.9, 0.1})),
                  UnsupportedDimension);
}

TEST_CASE("threshold functions evaluate per dimension") {
  ThresholdFn constant;
  constant.kind = ThresholdFn::Kind::Constant;
  constant.tau = 0.6;
  CHECK(constant.evaluate(5, 4) == doctest::Approx(0.6));

  ThresholdFn derived;
  derived.kind = ThresholdFn::Kind::SlowDerived;
  derived.system_id = "ladder";
  CHECK(derived.evaluate(3, 3) == doctest::Approx(8.0 / 9).epsilon(1e-9));
  CHECK(derived.evaluate(4, 5) == doctest::Approx(19.0 / 20).epsilon(1e-9));
}
