#include "pforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>

namespace pforge {

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(gen_() % span);
}

Allocation Rng::random_allocation(int m) {
  std::vector<double> v(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - uniform());
    sum += x;
  }
  for (double& x : v) x /= sum;
  return make_allocation(std::move(v));
}

Profile Rng::random_profile(int n, int m) {
  std::vector<Allocation> votes;
  votes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) votes.push_back(random_allocation(m));
  return make_profile(std::move(votes));
}

std::vector<int> Rng::random_permutation(int k) {
  std::vector<int> sigma(static_cast<std::size_t>(k));
  std::iota(sigma.begin(), sigma.end(), 0);
  for (int i = k - 1; i > 0; --i) std::swap(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(uniform_int(0, i))]);
  return sigma;
}

std::string profile_digest(const Profile& p) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    h ^= bits;
    h *= 1099511628211ULL;
  };
  for (const Allocation& v : p.votes) {
    for (int j = 0; j < p.m; ++j) mix(v[static_cast<std::size_t>(j)]);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "n=%d,m=%d,h=%016llx", p.n(), p.m,
                static_cast<unsigned long long>(h));
  return buf;
}

bool check_anonymity(const MechanismSpec& spec, const Profile& p, int trials,
                     std::uint64_t seed, const Tolerance& tol) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  Rng rng(seed);
  const Allocation base = apply_mechanism(spec, p, tol);
  for (int t = 0; t < trials; ++t) {
    const Profile q = permute_voters(p, rng.random_permutation(p.n()));
    if (linf_distance(apply_mechanism(spec, q, tol), base) > 1e-9) return false;
  }
  return true;
}

bool check_neutrality(const MechanismSpec& spec, const Profile& p, int trials,
                      std::uint64_t seed, const Tolerance& tol) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  Rng rng(seed);
  const Allocation base = apply_mechanism(spec, p, tol);
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> sigma = rng.random_permutation(p.m);
    const Allocation permuted_output = apply_mechanism(spec, permute_alternatives(p, sigma), tol);
    if (linf_distance(permuted_output, permute_entries(base, sigma)) > 1e-9) return false;
  }
  return true;
}

bool check_unanimity(const MechanismSpec& spec, const Allocation& v, int n,
                     const Tolerance& tol) {
  if (spec.require_n) n = *spec.require_n;
  std::vector<Allocation> votes(static_cast<std::size_t>(n), v);
  const Allocation out = apply_mechanism(spec, make_profile(std::move(votes)), tol);
  return linf_distance(out, v) <= 1e-9;
}

ContinuityReport continuity_probe(const MechanismSpec& spec, const Profile& p,
                                  const std::vector<double>& deltas, int trials,
                                  std::uint64_t seed, const Tolerance& tol) {
  ContinuityReport report;
  if (deltas.empty()) return report;
  Rng rng(seed);
  const Allocation base = apply_mechanism(spec, p, tol);
  for (double delta : deltas) {
    if (delta <= 0) throw std::invalid_argument("deltas must be positive");
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const int voter = rng.uniform_int(0, p.n() - 1);
      int i = rng.uniform_int(0, p.m - 1);
      int j = rng.uniform_int(0, p.m - 1);
      if (i == j) j = (j + 1) % p.m;
      const Allocation& vote = p.votes[static_cast<std::size_t>(voter)];
      const double move = std::min(delta / 2.0, vote[static_cast<std::size_t>(i)]);
      if (move < 1e-15) continue;
      std::vector<double> perturbed = vote.values();
      perturbed[static_cast<std::size_t>(i)] -= move;
      perturbed[static_cast<std::size_t>(j)] += move;
      Profile q = p;
      q.votes[static_cast<std::size_t>(voter)] = make_allocation(std::move(perturbed), tol);
      const double in_change = l1_distance(q.votes[static_cast<std::size_t>(voter)], vote);
      if (in_change < 1e-15) continue;
      worst = std::max(worst, l1_distance(apply_mechanism(spec, q, tol), base) / in_change);
    }
    report.deltas.push_back(delta);
    report.max_ratio.push_back(worst);
  }
  // Diverging ratios as the scale shrinks indicate a discontinuity.
  if (report.max_ratio.size() >= 2) {
    const double first = report.max_ratio.front();
    const double last = report.max_ratio.back();
    report.divergence_flag = last > std::max(10.0 * first, 100.0);
  }
  return report;
}

double misreport_disutility(const MechanismSpec& spec, const Profile& p, int voter,
                            const Allocation& misreport, const Tolerance& tol) {
  Profile q = p;
  q.votes[static_cast<std::size_t>(voter)] = misreport;
  return l1_distance(p.votes[static_cast<std::size_t>(voter)], apply_mechanism(spec, q, tol));
}

namespace {

void barycentric_grid(int m, int r, std::vector<Allocation>& out) {
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  // Enumerate all compositions of r into m non-negative parts.
  auto rec = [&](auto&& self, int coord, int remaining) -> void {
    if (coord == m - 1) {
      counts[static_cast<std::size_t>(coord)] = remaining;
      std::vector<double> v(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = static_cast<double>(counts[static_cast<std::size_t>(j)]) / r;
      out.push_back(make_allocation(std::move(v)));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(coord)] = c;
      self(self, coord + 1, remaining - c);
    }
  };
  rec(rec, 0, r);
}

}  // namespace

ManipulationResult manipulation_search(const MechanismSpec& spec, const Profile& p, int voter,
                                       const ManipulationConfig& cfg, const Tolerance& tol,
                                       std::uint64_t seed) {
  if (voter < 0 || voter >= p.n()) throw std::invalid_argument("voter index out of range");
  const int m = p.m;
  int r = cfg.grid_resolution;
  if (r == 0) r = m <= 3 ? 50 : 20;
  if (r < 2) throw std::invalid_argument("grid resolution must be >= 2");

  const Allocation& truth = p.votes[static_cast<std::size_t>(voter)];
  ManipulationResult result;
  result.voter = voter;
  result.truthful_disutility = misreport_disutility(spec, p, voter, truth, tol);
  result.best_misreport = truth;
  result.best_disutility = result.truthful_disutility;
  result.stats.candidates = 1;

  auto consider = [&](const Allocation& cand) {
    const double d = misreport_disutility(spec, p, voter, cand, tol);
    ++result.stats.candidates;
    if (d < result.best_disutility) {
      result.best_disutility = d;
      result.best_misreport = cand;
    }
  };

  if (m <= 4) {
    std::vector<Allocation> grid;
    barycentric_grid(m, r, grid);
    for (const Allocation& cand : grid) consider(cand);
  } else {
    Rng rng(seed);
    for (int j = 0; j < m; ++j) {
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(j)] = 1.0;
      consider(make_allocation(std::move(v)));
    }
    for (int i = 0; i < p.n(); ++i) {
      if (i != voter) consider(p.votes[static_cast<std::size_t>(i)]);
    }
    consider(apply_mechanism(spec, p, tol));
    for (int t = 0; t < cfg.random_candidates; ++t) consider(rng.random_allocation(m));
  }

  // Local refinement: single-coordinate-pair moves around the incumbent.
  double step = 1.0 / r;
  for (int round = 0; round < cfg.refinement_rounds; ++round) {
    const Allocation incumbent = result.best_misreport;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const double move = std::min(step, incumbent[static_cast<std::size_t>(i)]);
        if (move < 1e-15) continue;
        std::vector<double> v = incumbent.values();
        v[static_cast<std::size_t>(i)] -= move;
        v[static_cast<std::size_t>(j)] += move;
        consider(make_allocation(std::move(v), tol));
      }
    }
    step /= 5.0;
    ++result.stats.refinement_rounds;
  }

  result.gain = result.truthful_disutility - result.best_disutility;
  return result;
}

FairnessResult fairness(const MechanismSpec& spec, const Profile& p, const Tolerance& tol) {
  const Allocation out = apply_mechanism(spec, p, tol);
  const Allocation mu = mean_allocation(p);
  FairnessResult f;
  f.l1 = l1_distance(out, mu);
  f.linf = linf_distance(out, mu);
  f.mechanism = spec.id;
  f.profile_digest = profile_digest(p);
  return f;
}

FairnessResult worst_case_fairness(const MechanismSpec& spec, int n, int m, int trials,
                                   std::uint64_t seed, const Tolerance& tol) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  Rng rng(seed);
  FairnessResult worst;
  worst.mechanism = spec.id;
  auto consider = [&](const Profile& p) {
    const FairnessResult f = fairness(spec, p, tol);
    if (f.l1 > worst.l1) {
      worst.l1 = f.l1;
      worst.profile_digest = f.profile_digest;
    }
    worst.linf = std::max(worst.linf, f.linf);
  };

  consider(lower_bound_profile(n, m));
  // All-vertex profiles: a cyclic spread plus random vertex choices.
  {
    std::vector<Allocation> votes;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(i % m)] = 1.0;
      votes.push_back(make_allocation(std::move(v)));
    }
    consider(make_profile(std::move(votes)));
  }
  const int third = std::max(1, trials / 3);
  for (int t = 0; t < third; ++t) {
    std::vector<Allocation> votes;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(static_cast<std::size_t>(m), 0.0);
      v[static_cast<std::size_t>(rng.uniform_int(0, m - 1))] = 1.0;
      votes.push_back(make_allocation(std::move(v)));
    }
    consider(make_profile(std::move(votes)));
  }
  // Symmetric-line profiles: every vote of the form (alpha, even rest).
  for (int t = 0; t < third; ++t) {
    std::vector<Allocation> votes;
    for (int i = 0; i < n; ++i) votes.push_back(symmetric_vote(rng.uniform(), m));
    consider(make_profile(std::move(votes)));
  }
  for (int t = 0; t < trials - 2 * third; ++t) consider(rng.random_profile(n, m));
  return worst;
}

namespace {

// Clusters values within tol and returns sorted representatives.
std::vector<double> snap_table(std::vector<double> vals, double tol) {
  std::sort(vals.begin(), vals.end());
  std::vector<double> reps;
  for (double v : vals) {
    if (reps.empty() || v - reps.back() > tol) reps.push_back(v);
  }
  return reps;
}

double snap_to(const std::vector<double>& reps, double v) {
  auto it = std::lower_bound(reps.begin(), reps.end(), v);
  double best = reps.back();
  double dist = std::abs(v - best);
  if (it != reps.end() && std::abs(*it - v) < dist) {
    best = *it;
    dist = std::abs(*it - v);
  }
  if (it != reps.begin() && std::abs(*(it - 1) - v) < dist) best = *(it - 1);
  return best;
}

struct RepresentabilityProblem {
  int n = 0;
  int m = 0;
  std::vector<std::vector<double>> columns;  // snapped votes per alternative
  std::vector<double> targets;               // snapped a_j
  std::vector<double> candidates;            // representatives + midpoints

  RepresentabilityProblem(const Profile& p, const Allocation& a,
                          const std::vector<double>& extra_values) {
    n = p.n();
    m = p.m;
    std::vector<double> vals = {0.0, 1.0};
    for (int j = 0; j < m; ++j) vals.push_back(a[static_cast<std::size_t>(j)]);
    for (const Allocation& v : p.votes) {
      for (int j = 0; j < m; ++j) vals.push_back(v[static_cast<std::size_t>(j)]);
    }
    for (double v : extra_values) vals.push_back(v);
    const std::vector<double> reps = snap_table(std::move(vals), 1e-9);
    columns.assign(static_cast<std::size_t>(m), {});
    for (int j = 0; j < m; ++j) {
      for (const Allocation& v : p.votes) {
        columns[static_cast<std::size_t>(j)].push_back(snap_to(reps, v[static_cast<std::size_t>(j)]));
      }
      targets.push_back(snap_to(reps, a[static_cast<std::size_t>(j)]));
    }
    candidates = reps;
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
      candidates.push_back(0.5 * (reps[i] + reps[i + 1]));
    }
    std::sort(candidates.begin(), candidates.end());
  }

  // Number of alternatives whose median matches the target for phantom vector q.
  int matches(const std::vector<double>& q, int* first_mismatch, double* mismatch_median) const {
    int ok = 0;
    std::vector<double> buf;
    buf.reserve(q.size() + static_cast<std::size_t>(n));
    for (int j = 0; j < m; ++j) {
      buf.assign(q.begin(), q.end());
      const auto& col = columns[static_cast<std::size_t>(j)];
      buf.insert(buf.end(), col.begin(), col.end());
      std::nth_element(buf.begin(), buf.begin() + n, buf.end());
      const double med = buf[static_cast<std::size_t>(n)];
      if (std::abs(med - targets[static_cast<std::size_t>(j)]) <= 1e-9) {
        ++ok;
      } else if (ok == j && first_mismatch != nullptr) {
        *first_mismatch = j;
        if (mismatch_median != nullptr) *mismatch_median = med;
      }
    }
    return ok;
  }

  // Enumerates all non-increasing (n+1)-vectors over candidates, invoking
  // visit(q) for each; visit returns false to stop early.
  template <typename Visit>
  void enumerate(Visit&& visit) const {
    std::vector<double> q(static_cast<std::size_t>(n) + 1);
    const int top = static_cast<int>(candidates.size()) - 1;
    auto rec = [&](auto&& self, int k, int max_idx) -> bool {
      if (k > n) return visit(q);
      for (int i = max_idx; i >= 0; --i) {
        q[static_cast<std::size_t>(k)] = candidates[static_cast<std::size_t>(i)];
        if (!self(self, k + 1, i)) return false;
      }
      return true;
    };
    rec(rec, 0, top);
  }
};

}  // namespace

RepresentabilityResult phantom_representable(const Profile& p, const Allocation& a,
                                             const Tolerance& tol) {
  if (a.m() != p.m) throw DimensionMismatch("allocation/profile dimension mismatch");
  (void)tol;
  RepresentabilityProblem prob(p, a, {});
  RepresentabilityResult result;
  result.candidate_set = prob.candidates;

  int best_matches = -1;
  std::vector<double> best_q;
  int best_mismatch_j = 0;
  double best_mismatch_med = 0.0;
  prob.enumerate([&](const std::vector<double>& q) {
    int mismatch_j = 0;
    double mismatch_med = 0.0;
    const int ok = prob.matches(q, &mismatch_j, &mismatch_med);
    if (ok > best_matches) {
      best_matches = ok;
      best_q = q;
      best_mismatch_j = mismatch_j;
      best_mismatch_med = mismatch_med;
    }
    if (ok == prob.m) {
      result.feasible = true;
      result.witness = q;
      return false;
    }
    return true;
  });

  if (!result.feasible) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "best ordered phantom vector matches %d of %d medians; alternative %d "
                  "yields median %.12g instead of %.12g",
                  best_matches, prob.m, best_mismatch_j + 1, best_mismatch_med,
                  a[static_cast<std::size_t>(best_mismatch_j)]);
    result.blocking_explanation = buf;
  }
  return result;
}

ConsistencyResult phantom_family_consistent(const Profile& p1, const Allocation& a1,
                                            const Profile& p2, const Allocation& a2,
                                            const Tolerance& tol) {
  if (p1.n() != p2.n()) throw DimensionMismatch("profiles must share the voter count");
  (void)tol;
  // Shared candidate table so equal-by-intent values from the two instances
  // snap to the same representatives.
  std::vector<double> shared;
  auto add = [&shared](const Profile& p, const Allocation& a) {
    for (int j = 0; j < p.m; ++j) shared.push_back(a[static_cast<std::size_t>(j)]);
    for (const Allocation& v : p.votes) {
      for (int j = 0; j < p.m; ++j) shared.push_back(v[static_cast<std::size_t>(j)]);
    }
  };
  add(p1, a1);
  add(p2, a2);

  RepresentabilityProblem prob1(p1, a1, shared);
  RepresentabilityProblem prob2(p2, a2, shared);

  auto collect = [](const RepresentabilityProblem& prob) {
    std::vector<std::vector<double>> feasible;
    prob.enumerate([&](const std::vector<double>& q) {
      if (prob.matches(q, nullptr, nullptr) == prob.m) feasible.push_back(q);
      return feasible.size() < 5000;
    });
    return feasible;
  };
  const auto f1 = collect(prob1);
  const auto f2 = collect(prob2);

  ConsistencyResult result;
  if (f1.empty() || f2.empty()) {
    result.consistent = false;
    result.explanation = f1.empty() ? "first (profile, allocation) pair is not phantom-representable"
                                    : "second (profile, allocation) pair is not phantom-representable";
    return result;
  }
  auto leq = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] > b[k] + 1e-9) return false;
    }
    return true;
  };
  for (const auto& q1 : f1) {
    for (const auto& q2 : f2) {
      if (leq(q1, q2) || leq(q2, q1)) {
        result.consistent = true;
        result.explanation =
            "comparable feasible phantom vectors exist; a common family is not refuted by this test";
        return result;
      }
    }
  }
  result.consistent = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "no componentwise-comparable pair among %zu x %zu feasible phantom vectors",
                f1.size(), f2.size());
  result.explanation = buf;
  return result;
}

}  // namespace pforge
