#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "pforge/core.hpp"

using namespace pforge;

TEST_CASE("make_allocation validates and normalizes") {
  const Allocation a = make_allocation({0.5, 0.25, 0.25});
  CHECK(a.m() == 3);
  CHECK(a[0] == doctest::Approx(0.5));

  // Tiny float noise within tolerance is renormalized to an exact unit sum.
  const Allocation b = make_allocation({0.3333333333333333, 0.3333333333333333, 0.3333333333333333});
  double sum = 0.0;
  for (double x : b.values()) sum += x;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(make_allocation({0.5, 0.6}), SumOutOfRange);
  CHECK_THROWS_AS(make_allocation({0.2, 0.2}), SumOutOfRange);
  CHECK_THROWS_AS(make_allocation({1.2, -0.2}), NegativeEntry);
  CHECK_THROWS_AS(make_allocation({1.0}), DimensionMismatch);
}

TEST_CASE("distances on known points") {
  const Allocation vertex = make_allocation({1.0, 0.0, 0.0});
  const Allocation center = make_allocation({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(l1_distance(vertex, center) == doctest::Approx(4.0 / 3).epsilon(1e-12));
  CHECK(linf_distance(vertex, center) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(l1_distance(vertex, vertex) == doctest::Approx(0.0));
  CHECK_THROWS_AS(l1_distance(vertex, make_allocation({0.5, 0.5})), DimensionMismatch);
}

TEST_CASE("l1 distance equals overlap identity") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 5);
    auto draw = [&]() {
      std::vector<double> v(static_cast<std::size_t>(m));
      double s = 0.0;
      for (double& x : v) {
        x = -std::log(1.0 - u(gen));
        s += x;
      }
      for (double& x : v) x /= s;
      return make_allocation(v);
    };
    const Allocation a = draw();
    const Allocation b = draw();
    double overlap = 0.0;
    for (int j = 0; j < m; ++j) {
      overlap += std::min(a[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(j)]);
    }
    CHECK(l1_distance(a, b) == doctest::Approx(2.0 - 2.0 * overlap).epsilon(1e-12));
    // Norm sandwich.
    CHECK(linf_distance(a, b) <= l1_distance(a, b) + 1e-12);
    CHECK(l1_distance(a, b) <= m * linf_distance(a, b) + 1e-12);
  }
}

TEST_CASE("symmetric_vote puts alpha on the first alternative and splits the rest") {
  const Allocation v = symmetric_vote(0.5, 3);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.25));
  CHECK(v[2] == doctest::Approx(0.25));
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 6);
    const Allocation w = symmetric_vote(u(gen), m);
    CHECK(w.m() == m);
    for (int j = 2; j < m; ++j) {
      CHECK(w[static_cast<std::size_t>(j)] == doctest::Approx(w[1]));
    }
  }
}

TEST_CASE("lower_bound_profile shape") {
  const Profile p = lower_bound_profile(5, 4);
  CHECK(p.n() == 5);
  CHECK(p.m == 4);
  int centers = 0;
  int vertices = 0;
  for (const Allocation& v : p.votes) {
    if (std::abs(v[0] - 0.25) < 1e-12) {
      ++centers;
    } else {
      CHECK(v[0] == doctest::Approx(1.0));
      ++vertices;
    }
  }
  CHECK(centers == 3);
  CHECK(vertices == 2);
}

TEST_CASE("permutations act on entries and invert cleanly") {
  const Allocation a = make_allocation({0.6, 0.3, 0.1});
  // out[j] = in[sigma[j]]: a 3-cycle.
  const std::vector<int> sigma{1, 2, 0};
  const Allocation b = permute_entries(a, sigma);
  CHECK(b[0] == doctest::Approx(0.3));
  CHECK(b[1] == doctest::Approx(0.1));
  CHECK(b[2] == doctest::Approx(0.6));

  std::vector<int> inverse(3);
  for (int j = 0; j < 3; ++j) inverse[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])] = j;
  const Allocation c = permute_entries(b, inverse);
  CHECK(l1_distance(a, c) == doctest::Approx(0.0));

  CHECK_THROWS_AS(permute_entries(a, std::vector<int>{0, 0, 1}), InvalidPermutation);
  CHECK_THROWS_AS(permute_entries(a, std::vector<int>{0, 1}), InvalidPermutation);

  const Profile p = lower_bound_profile(3, 3);
  const Profile pv = permute_voters(p, std::vector<int>{2, 0, 1});
  CHECK(l1_distance(pv.votes[0], p.votes[2]) == doctest::Approx(0.0));
  const Profile pa = permute_alternatives(p, sigma);
  CHECK(pa.votes[2][2] == doctest::Approx(1.0));
}
