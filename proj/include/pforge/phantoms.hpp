#pragma once

#include <string>
#include <vector>

#include "pforge/core.hpp"

namespace pforge {

struct UnknownSystem : std::runtime_error {
  explicit UnknownSystem(const std::string& what) : std::runtime_error(what) {}
};
struct NotNormalizable : std::runtime_error {
  explicit NotNormalizable(const std::string& what) : std::runtime_error(what) {}
};

enum class PhantomFamily {
  GreedyMax,
  GreedyMin,
  MaxUtilitarianWelfare,
  IndependentMarkets,
  Ladder,
  PiecewiseUniform,
  Table,
};

// n+1 non-decreasing continuous phantom position functions f_0 >= ... >= f_n,
// all starting at 0. Built-in families evaluate closed forms; Table systems
// interpolate linearly between user-supplied breakpoint rows.
struct PhantomSystem {
  PhantomFamily family = PhantomFamily::Table;
  std::string id;
  int n = 0;
  std::vector<double> table_t;                // Table only: ascending times
  std::vector<std::vector<double>> table_f;   // Table only: n+1 values per row
  std::vector<double> breakpoint_hint;        // t values where some phantom is non-smooth

  double position(int k, double t) const;
  // Writes positions f_0(t)..f_n(t) into out (length n+1).
  void positions(double t, double* out) const;
};

// id in {greedymax, greedymin, max_utilitarian_welfare, independent_markets,
// ladder, piecewise_uniform}.
PhantomSystem builtin_system(const std::string& id, int n);

// Builds a piecewise-linear system from breakpoint rows and validates the
// phantom axioms on load.
PhantomSystem table_system(std::string id, int n, std::vector<double> ts,
                           std::vector<std::vector<double>> rows);

// Checks zero-at-0, monotonicity in t, ordering across k, and range [0,1]
// on a t-grid; throws std::invalid_argument on violation.
void validate_phantom_axioms(const PhantomSystem& s, int grid_points = 1001);

// Per alternative j, the median of {f_0(t),...,f_n(t)} and the n votes on j.
std::vector<double> medians_at(const PhantomSystem& s, const Profile& p, double t);

// Bisection for a t* where the median sum reaches 1.
double normalization_time(const PhantomSystem& s, const Profile& p, const Tolerance& tol = {});

// Medians at t*, renormalized to an exact Allocation.
Allocation run_moving_phantom(const PhantomSystem& s, const Profile& p, const Tolerance& tol = {});

// Budget iteration over alternatives in increasing order of max votes;
// equals run_moving_phantom(greedymax, p).
Allocation greedy_max_direct(const Profile& p);

// Budget iteration over alternatives in decreasing order of min votes;
// equals run_moving_phantom(greedymin, p).
Allocation greedy_min_direct(const Profile& p);

struct MedianTrace {
  std::vector<double> t_grid;
  std::vector<std::vector<double>> medians;  // per time, m medians
  std::vector<double> sums;
};

MedianTrace median_trace(const PhantomSystem& s, const Profile& p, int grid_size);

}  // namespace pforge
