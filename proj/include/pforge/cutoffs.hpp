#pragma once

#include <string>

#include "pforge/core.hpp"
#include "pforge/phantoms.hpp"

namespace pforge {

struct InvalidThreshold : std::runtime_error {
  explicit InvalidThreshold(const std::string& what) : std::runtime_error(what) {}
};
struct NotSlow : std::runtime_error {
  explicit NotSlow(const std::string& what) : std::runtime_error(what) {}
};
struct UnsupportedDimension : std::runtime_error {
  explicit UnsupportedDimension(const std::string& what) : std::runtime_error(what) {}
};

// Lowers a coordinate exceeding tau down to tau and spreads the surplus
// evenly over the other coordinates. tau in [1/2, 1).
Allocation aggregate_cutoff(const Allocation& a, double tau, const Tolerance& tol = {});

// A system is slow when some t has f_0(t) < 1 while f_{n-1}(t) > 0, and the
// last phantom is still at 0 at the first time f_0 reaches 1.
bool is_slow(const PhantomSystem& s);

// tau = 1 - f_{n-1}(t*) at the largest t* with f_0(t*) <= 1 - (m-1) f_{n-1}(t*).
double slow_threshold(const PhantomSystem& s, int m, const Tolerance& tol = {});

// Memoized slow_threshold for built-in system ids.
double slow_threshold_cached(const std::string& system_id, int n, int m);

// aggregate_cutoff applied independently to every vote.
Profile vote_cutoff(const Profile& p, double tau, const Tolerance& tol = {});

// Unanimity-preserving cutoff: softens the cut of v's largest coordinate by
// how far the other voter w is from agreeing. m = 3 only.
Allocation unanimous_vote_cutoff(const Allocation& v, const Allocation& w,
                                 double hard = 0.8, double soft = 0.7);

struct ThresholdFn {
  enum class Kind { Constant, SlowDerived };
  Kind kind = Kind::Constant;
  double tau = 0.5;        // Constant
  std::string system_id;   // SlowDerived
  double evaluate(int n, int m) const;
};

}  // namespace pforge
