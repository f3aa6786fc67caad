#include "pforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pforge {

void Tolerance::validate() const {
  if (eps_simplex <= 0 || eps_time <= 0 || eps_gain <= 0) {
    throw std::invalid_argument("tolerances must be strictly positive");
  }
  if (eps_time >= eps_simplex) {
    throw std::invalid_argument("eps_time must be smaller than eps_simplex");
  }
}

Allocation make_allocation(std::vector<double> values, const Tolerance& tol) {
  tol.validate();
  if (values.empty()) throw DimensionMismatch("allocation must be nonempty");
  if (values.size() < 2) throw DimensionMismatch("allocation needs at least 2 alternatives");
  double sum = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw NegativeEntry("allocation entry is not finite");
    if (x < -tol.eps_simplex) {
      throw NegativeEntry("allocation entry " + std::to_string(x) + " is negative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol.eps_simplex) {
    throw SumOutOfRange("allocation sums to " + std::to_string(sum));
  }
  for (double& x : values) x = std::clamp(x, 0.0, 1.0);
  sum = std::accumulate(values.begin(), values.end(), 0.0);
  for (double& x : values) x /= sum;
  Allocation a;
  a.v_ = std::move(values);
  return a;
}

Profile make_profile(std::vector<Allocation> votes) {
  if (votes.empty()) throw DimensionMismatch("profile needs at least one vote");
  const int m = votes.front().m();
  for (const Allocation& v : votes) {
    if (v.m() != m) throw DimensionMismatch("votes disagree on alternative count");
  }
  Profile p;
  p.m = m;
  p.votes = std::move(votes);
  return p;
}

double l1_distance(const Allocation& a, const Allocation& b) {
  if (a.m() != b.m()) throw DimensionMismatch("l1_distance dimension mismatch");
  double d = 0.0;
  for (int j = 0; j < a.m(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

double linf_distance(const Allocation& a, const Allocation& b) {
  if (a.m() != b.m()) throw DimensionMismatch("linf_distance dimension mismatch");
  double d = 0.0;
  for (int j = 0; j < a.m(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

Allocation symmetric_vote(double alpha, int m) {
  if (m < 2) throw DimensionMismatch("symmetric_vote needs m >= 2");
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("symmetric_vote alpha must be in [0,1]");
  }
  std::vector<double> v(static_cast<std::size_t>(m), (1.0 - alpha) / (m - 1));
  v[0] = alpha;
  return make_allocation(std::move(v));
}

Profile lower_bound_profile(int n, int m) {
  if (n < 1) throw DimensionMismatch("lower_bound_profile needs n >= 1");
  if (m < 2) throw DimensionMismatch("lower_bound_profile needs m >= 2");
  const int centers = (n + 1) / 2;
  std::vector<Allocation> votes;
  votes.reserve(static_cast<std::size_t>(n));
  const Allocation center = symmetric_vote(1.0 / m, m);
  const Allocation vertex = symmetric_vote(1.0, m);
  for (int i = 0; i < n; ++i) votes.push_back(i < centers ? center : vertex);
  return make_profile(std::move(votes));
}

namespace {
void check_permutation(const std::vector<int>& sigma, int size) {
  if (static_cast<int>(sigma.size()) != size) {
    throw InvalidPermutation("permutation has wrong size");
  }
  std::vector<char> seen(static_cast<std::size_t>(size), 0);
  for (int s : sigma) {
    if (s < 0 || s >= size || seen[static_cast<std::size_t>(s)]) {
      throw InvalidPermutation("not a bijection");
    }
    seen[static_cast<std::size_t>(s)] = 1;
  }
}
}  // namespace

Allocation permute_entries(const Allocation& a, const std::vector<int>& sigma) {
  check_permutation(sigma, a.m());
  std::vector<double> out(static_cast<std::size_t>(a.m()));
  for (int j = 0; j < a.m(); ++j) out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(sigma[static_cast<std::size_t>(j)])];
  return make_allocation(std::move(out));
}

Profile permute_voters(const Profile& p, const std::vector<int>& sigma) {
  check_permutation(sigma, p.n());
  std::vector<Allocation> votes;
  votes.reserve(p.votes.size());
  for (int i = 0; i < p.n(); ++i) votes.push_back(p.votes[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])]);
  return make_profile(std::move(votes));
}

Profile permute_alternatives(const Profile& p, const std::vector<int>& sigma) {
  check_permutation(sigma, p.m);
  std::vector<Allocation> votes;
  votes.reserve(p.votes.size());
  for (const Allocation& v : p.votes) votes.push_back(permute_entries(v, sigma));
  return make_profile(std::move(votes));
}

}  // namespace pforge
