#include "pforge/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pforge {

double PhantomSystem::position(int k, double t) const {
  switch (family) {
    case PhantomFamily::GreedyMax:
      return k < n ? t : 0.0;
    case PhantomFamily::GreedyMin:
      return k == 0 ? std::min(2.0 * t, 1.0) : std::max(0.0, 2.0 * t - 1.0);
    case PhantomFamily::MaxUtilitarianWelfare: {
      // Phantom k moves linearly from 0 to 1 on [k/(n+1), (k+1)/(n+1)].
      const double v = t * (n + 1) - k;
      return std::clamp(v, 0.0, 1.0);
    }
    case PhantomFamily::IndependentMarkets:
      return t * static_cast<double>(n - k) / n;
    case PhantomFamily::Ladder:
      return std::max(t - static_cast<double>(k) / n, 0.0);
    case PhantomFamily::PiecewiseUniform: {
      const double nk = static_cast<double>(n - k);
      if (2 * k <= n) {
        if (t < 0.5) return 4.0 * t * nk / n - 2.0 * t;
        return nk * (3.0 - 2.0 * t) / n - 2.0 + 2.0 * t;
      }
      if (t < 0.5) return 0.0;
      return nk * (2.0 * t - 1.0) / n;
    }
    case PhantomFamily::Table: {
      if (t <= table_t.front()) return table_f.front()[static_cast<std::size_t>(k)];
      if (t >= table_t.back()) return table_f.back()[static_cast<std::size_t>(k)];
      auto it = std::upper_bound(table_t.begin(), table_t.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - table_t.begin());
      const std::size_t lo = hi - 1;
      const double t0 = table_t[lo], t1 = table_t[hi];
      const double f0 = table_f[lo][static_cast<std::size_t>(k)];
      const double f1 = table_f[hi][static_cast<std::size_t>(k)];
      if (t1 <= t0) return f1;
      return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
    }
  }
  throw std::logic_error("unreachable phantom family");
}

void PhantomSystem::positions(double t, double* out) const {
  for (int k = 0; k <= n; ++k) out[k] = position(k, t);
}

PhantomSystem builtin_system(const std::string& id, int n) {
  if (n < 1) throw DimensionMismatch("phantom system needs n >= 1");
  PhantomSystem s;
  s.id = id;
  s.n = n;
  if (id == "greedymax") {
    s.family = PhantomFamily::GreedyMax;
  } else if (id == "greedymin") {
    s.family = PhantomFamily::GreedyMin;
    s.breakpoint_hint = {0.5};
  } else if (id == "max_utilitarian_welfare") {
    s.family = PhantomFamily::MaxUtilitarianWelfare;
    for (int k = 0; k <= n + 1; ++k) s.breakpoint_hint.push_back(static_cast<double>(k) / (n + 1));
  } else if (id == "independent_markets") {
    s.family = PhantomFamily::IndependentMarkets;
  } else if (id == "ladder") {
    s.family = PhantomFamily::Ladder;
    for (int k = 0; k <= n; ++k) s.breakpoint_hint.push_back(static_cast<double>(k) / n);
  } else if (id == "piecewise_uniform") {
    s.family = PhantomFamily::PiecewiseUniform;
    s.breakpoint_hint = {0.5};
  } else {
    throw UnknownSystem("unknown phantom system: " + id);
  }
  return s;
}

PhantomSystem table_system(std::string id, int n, std::vector<double> ts,
                           std::vector<std::vector<double>> rows) {
  if (n < 1) throw DimensionMismatch("phantom system needs n >= 1");
  if (ts.size() < 2 || ts.size() != rows.size()) {
    throw std::invalid_argument("table system needs matching times and rows (>= 2)");
  }
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n + 1) {
      throw std::invalid_argument("table row must have n+1 phantom values");
    }
  }
  PhantomSystem s;
  s.family = PhantomFamily::Table;
  s.id = std::move(id);
  s.n = n;
  s.table_t = std::move(ts);
  s.table_f = std::move(rows);
  s.breakpoint_hint = s.table_t;
  validate_phantom_axioms(s);
  return s;
}

void validate_phantom_axioms(const PhantomSystem& s, int grid_points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(grid_points) + s.breakpoint_hint.size());
  for (int i = 0; i < grid_points; ++i) grid.push_back(static_cast<double>(i) / (grid_points - 1));
  for (double b : s.breakpoint_hint) {
    if (b >= 0.0 && b <= 1.0) grid.push_back(b);
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> prev(static_cast<std::size_t>(s.n) + 1, 0.0);
  std::vector<double> cur(static_cast<std::size_t>(s.n) + 1, 0.0);
  const double eps = 1e-12;
  s.positions(0.0, prev.data());
  for (double v : prev) {
    if (std::abs(v) > eps) throw std::invalid_argument("phantoms must start at 0");
  }
  for (std::size_t g = 1; g < grid.size(); ++g) {
    s.positions(grid[g], cur.data());
    for (int k = 0; k <= s.n; ++k) {
      const std::size_t ku = static_cast<std::size_t>(k);
      if (cur[ku] < -eps || cur[ku] > 1.0 + eps) {
        throw std::invalid_argument("phantom value outside [0,1]");
      }
      if (cur[ku] < prev[ku] - eps) throw std::invalid_argument("phantom not monotone in t");
      if (k > 0 && cur[ku] > cur[ku - 1] + eps) {
        throw std::invalid_argument("phantoms not ordered across k");
      }
    }
    std::swap(prev, cur);
  }
}

namespace detail {

// Vote columns plus scratch buffers; lets the bisection loop avoid
// re-extracting votes at every trial t.
struct MedianWorkspace {
  int n;
  int m;
  std::vector<std::vector<double>> columns;
  mutable std::vector<double> phantom;
  mutable std::vector<double> buf;

  explicit MedianWorkspace(const Profile& p)
      : n(p.n()), m(p.m), columns(static_cast<std::size_t>(p.m)) {
    for (int j = 0; j < m; ++j) {
      columns[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(n));
      for (const Allocation& v : p.votes) {
        columns[static_cast<std::size_t>(j)].push_back(v[static_cast<std::size_t>(j)]);
      }
    }
    phantom.resize(static_cast<std::size_t>(n) + 1);
    buf.resize(2 * static_cast<std::size_t>(n) + 1);
  }

  // Median sum at time t; optionally writes the m medians.
  double median_sum(const PhantomSystem& s, double t, double* meds = nullptr) const {
    s.positions(t, phantom.data());
    double sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const auto& col = columns[static_cast<std::size_t>(j)];
      std::copy(phantom.begin(), phantom.end(), buf.begin());
      std::copy(col.begin(), col.end(), buf.begin() + n + 1);
      std::nth_element(buf.begin(), buf.begin() + n, buf.end());
      const double med = buf[static_cast<std::size_t>(n)];
      if (meds != nullptr) meds[j] = med;
      sum += med;
    }
    return sum;
  }
};

}  // namespace detail

std::vector<double> medians_at(const PhantomSystem& s, const Profile& p, double t) {
  if (s.n != p.n()) throw DimensionMismatch("phantom system voter count mismatch");
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("t must be in [0,1]");
  detail::MedianWorkspace ws(p);
  std::vector<double> meds(static_cast<std::size_t>(p.m));
  ws.median_sum(s, t, meds.data());
  return meds;
}

namespace {

double solve_normalization(const detail::MedianWorkspace& ws, const PhantomSystem& s,
                           const Tolerance& tol) {
  const double at_one = ws.median_sum(s, 1.0);
  if (at_one < 1.0 - tol.eps_simplex) {
    throw NotNormalizable("median sum at t=1 is " + std::to_string(at_one));
  }
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 80 && hi - lo > tol.eps_time; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ws.median_sum(s, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double normalization_time(const PhantomSystem& s, const Profile& p, const Tolerance& tol) {
  if (s.n != p.n()) throw DimensionMismatch("phantom system voter count mismatch");
  detail::MedianWorkspace ws(p);
  return solve_normalization(ws, s, tol);
}

Allocation run_moving_phantom(const PhantomSystem& s, const Profile& p, const Tolerance& tol) {
  if (s.n != p.n()) throw DimensionMismatch("phantom system voter count mismatch");
  detail::MedianWorkspace ws(p);
  const double tstar = solve_normalization(ws, s, tol);
  std::vector<double> meds(static_cast<std::size_t>(p.m));
  const double sum = ws.median_sum(s, tstar, meds.data());
  if (sum <= 0.0) throw NotNormalizable("median sum vanished at t*");
  for (double& x : meds) x /= sum;
  return make_allocation(std::move(meds), tol);
}

namespace {

Allocation greedy_direct(const Profile& p, bool use_max) {
  const int m = p.m;
  std::vector<double> key(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    double k = p.votes.front()[static_cast<std::size_t>(j)];
    for (const Allocation& v : p.votes) {
      k = use_max ? std::max(k, v[static_cast<std::size_t>(j)]) : std::min(k, v[static_cast<std::size_t>(j)]);
    }
    key[static_cast<std::size_t>(j)] = k;
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  // Ties resolved in index order; tied alternatives end up with equal shares
  // either way.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ka = key[static_cast<std::size_t>(a)];
    const double kb = key[static_cast<std::size_t>(b)];
    return use_max ? ka < kb : ka > kb;
  });
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  double budget = 1.0;
  for (int pos = 0; pos < m; ++pos) {
    const int j = order[static_cast<std::size_t>(pos)];
    const double share = budget / (m - pos);
    const double k = key[static_cast<std::size_t>(j)];
    const bool take_vote = use_max ? (k < share) : (k > share);
    if (take_vote) {
      out[static_cast<std::size_t>(j)] = k;
      budget -= k;
    } else {
      for (int q = pos; q < m; ++q) out[static_cast<std::size_t>(order[static_cast<std::size_t>(q)])] = share;
      budget = 0.0;
      break;
    }
  }
  return make_allocation(std::move(out));
}

}  // namespace

Allocation greedy_max_direct(const Profile& p) { return greedy_direct(p, true); }

Allocation greedy_min_direct(const Profile& p) { return greedy_direct(p, false); }

MedianTrace median_trace(const PhantomSystem& s, const Profile& p, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  if (s.n != p.n()) throw DimensionMismatch("phantom system voter count mismatch");
  detail::MedianWorkspace ws(p);
  MedianTrace trace;
  trace.t_grid.reserve(static_cast<std::size_t>(grid_size));
  std::vector<double> meds(static_cast<std::size_t>(p.m));
  for (int i = 0; i < grid_size; ++i) {
    const double t = static_cast<double>(i) / (grid_size - 1);
    const double sum = ws.median_sum(s, t, meds.data());
    trace.t_grid.push_back(t);
    trace.medians.push_back(meds);
    trace.sums.push_back(sum);
  }
  return trace;
}

}  // namespace pforge
