#include "pforge/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace pforge {

namespace {

void check_threshold(double tau) {
  if (!(tau >= 0.5 && tau < 1.0)) {
    throw InvalidThreshold("threshold must be in [1/2, 1), got " + std::to_string(tau));
  }
}

// Scan grid: evenly spaced points plus breakpoint hints and their midpoints.
std::vector<double> scan_grid(const PhantomSystem& s, int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 2 * s.breakpoint_hint.size());
  for (int i = 0; i < points; ++i) grid.push_back(static_cast<double>(i) / (points - 1));
  for (std::size_t i = 0; i < s.breakpoint_hint.size(); ++i) {
    const double b = s.breakpoint_hint[i];
    if (b >= 0.0 && b <= 1.0) grid.push_back(b);
    if (i + 1 < s.breakpoint_hint.size()) {
      const double mid = 0.5 * (b + s.breakpoint_hint[i + 1]);
      if (mid >= 0.0 && mid <= 1.0) grid.push_back(mid);
    }
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

}  // namespace

Allocation aggregate_cutoff(const Allocation& a, double tau, const Tolerance& tol) {
  check_threshold(tau);
  const int m = a.m();
  int argmax = 0;
  int above = 0;
  for (int j = 0; j < m; ++j) {
    if (a[static_cast<std::size_t>(j)] > a[static_cast<std::size_t>(argmax)]) argmax = j;
    if (a[static_cast<std::size_t>(j)] > tau + tol.eps_simplex) ++above;
  }
  if (above > 1) {
    // Two coordinates above tau >= 1/2 would exceed the budget.
    throw std::logic_error("multiple coordinates above threshold on a simplex point");
  }
  const double peak = a[static_cast<std::size_t>(argmax)];
  if (peak <= tau) return a;
  std::vector<double> out = a.values();
  const double surplus = peak - tau;
  out[static_cast<std::size_t>(argmax)] = tau;
  for (int j = 0; j < m; ++j) {
    if (j != argmax) out[static_cast<std::size_t>(j)] += surplus / (m - 1);
  }
  return make_allocation(std::move(out), tol);
}

bool is_slow(const PhantomSystem& s) {
  const int n = s.n;
  const double eps = 1e-9;
  bool second_moves_early = false;
  for (double t : scan_grid(s, 2001)) {
    if (s.position(0, t) < 1.0 - eps && s.position(n - 1, t) > eps) {
      second_moves_early = true;
      break;
    }
  }
  if (!second_moves_early) return false;
  if (s.position(0, 1.0) < 1.0 - eps) {
    // f_0 never reaches 1; the second condition is vacuous.
    return true;
  }
  // Smallest t with f_0(t) = 1, by bisection on the monotone f_0.
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 80 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (s.position(0, mid) < 1.0 - 1e-12) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return s.position(n, hi) <= eps;
}

double slow_threshold(const PhantomSystem& s, int m, const Tolerance& tol) {
  if (m < 2) throw DimensionMismatch("slow_threshold needs m >= 2");
  if (!is_slow(s)) throw NotSlow("system " + s.id + " is not slow");
  const int n = s.n;
  auto g = [&](double t) {
    return s.position(0, t) - 1.0 + (m - 1) * s.position(n - 1, t);
  };
  double tstar;
  if (g(1.0) <= 0.0) {
    tstar = 1.0;
  } else {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 80 && hi - lo > tol.eps_time; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    tstar = 0.5 * (lo + hi);
  }
  double tau = 1.0 - s.position(n - 1, tstar);
  tau = std::clamp(tau, 0.5, 1.0);
  if (tau >= 1.0 - 1e-12) {
    throw NotSlow("derived threshold for " + s.id + " is not below 1");
  }
  return tau;
}

double slow_threshold_cached(const std::string& system_id, int n, int m) {
  static std::mutex mu;
  static std::map<std::tuple<std::string, int, int>, double> cache;
  const auto key = std::make_tuple(system_id, n, m);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double tau = slow_threshold(builtin_system(system_id, n), m);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, tau);
  return tau;
}

Profile vote_cutoff(const Profile& p, double tau, const Tolerance& tol) {
  check_threshold(tau);
  std::vector<Allocation> votes;
  votes.reserve(p.votes.size());
  for (const Allocation& v : p.votes) votes.push_back(aggregate_cutoff(v, tau, tol));
  return make_profile(std::move(votes));
}

Allocation unanimous_vote_cutoff(const Allocation& v, const Allocation& w,
                                 double hard, double soft) {
  if (v.m() != 3 || w.m() != 3) {
    throw UnsupportedDimension("unanimous vote cutoff is defined for m = 3 only");
  }
  if (!(soft < hard && hard < 1.0)) {
    throw InvalidThreshold("need soft < hard < 1 for the unanimous cutoff");
  }
  int k = 0;
  for (int j = 1; j < 3; ++j) {
    if (v[static_cast<std::size_t>(j)] > v[static_cast<std::size_t>(k)]) k = j;
  }
  if (v[static_cast<std::size_t>(k)] <= hard) return v;
  const double factor =
      std::clamp((hard - w[static_cast<std::size_t>(k)]) / (hard - soft), 0.0, 1.0);
  const double gamma = (v[static_cast<std::size_t>(k)] - hard) * factor;
  std::vector<double> out = v.values();
  out[static_cast<std::size_t>(k)] -= gamma;
  for (int j = 0; j < 3; ++j) {
    if (j != k) out[static_cast<std::size_t>(j)] += gamma / 2.0;
  }
  return make_allocation(std::move(out));
}

double ThresholdFn::evaluate(int n, int m) const {
  if (kind == Kind::Constant) {
    check_threshold(tau);
    return tau;
  }
  return slow_threshold_cached(system_id, n, m);
}

}  // namespace pforge
