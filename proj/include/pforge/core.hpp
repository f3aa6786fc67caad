#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pforge {

struct SumOutOfRange : std::runtime_error {
  explicit SumOutOfRange(const std::string& what) : std::runtime_error(what) {}
};
struct NegativeEntry : std::runtime_error {
  explicit NegativeEntry(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidPermutation : std::runtime_error {
  explicit InvalidPermutation(const std::string& what) : std::runtime_error(what) {}
};

// Numerical margins used throughout: eps_simplex for simplex membership,
// eps_time for the bisection stop, eps_gain for manipulation margins.
struct Tolerance {
  double eps_simplex = 1e-9;
  double eps_time = 1e-12;
  double eps_gain = 1e-7;
  void validate() const;
};

// A point of the standard (m-1)-simplex: m non-negative budget shares summing to 1.
class Allocation {
 public:
  Allocation() = default;
  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t j) const { return v_[j]; }
  int m() const { return static_cast<int>(v_.size()); }
  bool operator==(const Allocation& other) const { return v_ == other.v_; }

  friend Allocation make_allocation(std::vector<double> values, const Tolerance& tol);

 private:
  std::vector<double> v_;
};

// Validates, clamps entries to [0,1], and renormalizes by the exact sum.
Allocation make_allocation(std::vector<double> values, const Tolerance& tol = {});

// Ordered voter reports over m alternatives.
struct Profile {
  int m = 0;
  std::vector<Allocation> votes;
  int n() const { return static_cast<int>(votes.size()); }
};

Profile make_profile(std::vector<Allocation> votes);

double l1_distance(const Allocation& a, const Allocation& b);
double linf_distance(const Allocation& a, const Allocation& b);

// (alpha, (1-alpha)/(m-1), ..., (1-alpha)/(m-1)).
Allocation symmetric_vote(double alpha, int m);

// ceil(n/2) votes at the center, floor(n/2) votes at the first vertex.
Profile lower_bound_profile(int n, int m);

// Applies out[j] = in[sigma[j]] to a single allocation (0-based sigma).
Allocation permute_entries(const Allocation& a, const std::vector<int>& sigma);

// Reorders votes: out_vote[i] = vote[sigma[i]].
Profile permute_voters(const Profile& p, const std::vector<int>& sigma);

// Applies the same coordinate reordering out[j] = in[sigma[j]] to every vote.
Profile permute_alternatives(const Profile& p, const std::vector<int>& sigma);

}  // namespace pforge
