#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "pforge/verify.hpp"

namespace pforge {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

Allocation alloc3(double a, double b, double c) { return make_allocation({a, b, c}); }

// n-1 voters on the first vertex plus one voter at ((1+tau)/2, (1-tau)/2, 0...).
Profile extreme_two_block_profile(int n, int m, double tau) {
  std::vector<double> special(static_cast<std::size_t>(m), 0.0);
  special[0] = (1.0 + tau) / 2.0;
  special[1] = (1.0 - tau) / 2.0;
  std::vector<Allocation> votes(static_cast<std::size_t>(n - 1), symmetric_vote(1.0, m));
  votes.push_back(make_allocation(std::move(special)));
  return make_profile(std::move(votes));
}

ScenarioResult scenario_mean_not_truthful(std::uint64_t seed, const Tolerance& tol) {
  const Profile p = make_profile({make_allocation({1.0, 0.0}), make_allocation({0.5, 0.5})});
  const ManipulationResult r =
      manipulation_search(registry_find("mean"), p, 1, {}, tol, seed);
  const bool passed = std::abs(r.gain - 0.5) <= 1e-12;
  return {"mean_not_truthful", passed,
          fmt("voter 2 gains %.12g by misreporting (expected 0.5)", r.gain)};
}

ScenarioResult scenario_prop2(std::uint64_t, const Tolerance& tol) {
  const double tau = 0.5;
  const MechanismSpec spec = registry_find("cutoff_greedymax");
  bool passed = true;
  std::string detail;
  for (int n = 2; n <= 4 && passed; ++n) {
    for (int m = 3; m <= 4 && passed; ++m) {
      const Profile p = extreme_two_block_profile(n, m, tau);
      const Allocation out = apply_mechanism(spec, p, tol);
      std::vector<double> expected(static_cast<std::size_t>(m), (1.0 - tau) / (2.0 * (m - 1)));
      expected[0] = tau;
      expected[1] = (1.0 - tau) / 2.0 + (1.0 - tau) / (2.0 * (m - 1));
      if (linf_distance(out, make_allocation(expected, tol)) > 1e-9) {
        passed = false;
        detail = fmt("closed form mismatch at n=%.0f, m=%.0f", n, m);
        break;
      }
      const RepresentabilityResult rep = phantom_representable(p, out, tol);
      if (rep.feasible) {
        passed = false;
        detail = fmt("unexpectedly phantom-representable at n=%.0f, m=%.0f", n, m);
      }
    }
  }
  if (passed) {
    detail = "cutoff output matches the closed form and is not phantom-representable "
             "for n in 2..4, m in 3..4";
  }
  return {"prop2_cutoffgreedymax_nonphantom", passed, detail};
}

ScenarioResult fuzz_truthful(const std::string& scenario, const std::vector<MechanismSpec>& specs,
                             int profiles_per_spec, std::uint64_t seed, const Tolerance& tol) {
  Rng rng(seed);
  double worst_gain = 0.0;
  std::string offender;
  for (const MechanismSpec& spec : specs) {
    for (int t = 0; t < profiles_per_spec; ++t) {
      const int n = spec.require_n ? *spec.require_n : rng.uniform_int(1, 4);
      const int m = spec.require_m ? *spec.require_m : rng.uniform_int(2, 4);
      const Profile p = rng.random_profile(n, m);
      const int voter = rng.uniform_int(0, n - 1);
      const ManipulationResult r = manipulation_search(spec, p, voter, {}, tol, rng.raw());
      if (r.gain > worst_gain) {
        worst_gain = r.gain;
        offender = spec.id + " on " + profile_digest(p);
      }
    }
  }
  const bool passed = worst_gain <= tol.eps_gain;
  std::string detail = fmt("no violation found (worst gain %.3g over search budget", worst_gain) +
                       fmt(" %.0f profiles/mechanism)", profiles_per_spec);
  if (!passed) detail = "violation: gain " + fmt("%.6g via ", worst_gain) + offender;
  return {scenario, passed, detail};
}

ScenarioResult scenario_prop3(std::uint64_t seed, const Tolerance& tol) {
  std::vector<MechanismSpec> specs;
  for (double tau : {0.5, 0.6, 0.8}) {
    MechanismSpec s = registry_find("cutoff_greedymax");
    s.threshold.tau = tau;
    s.id = "cutoff_greedymax(tau=" + std::to_string(tau) + ")";
    specs.push_back(s);
  }
  ScenarioResult r = fuzz_truthful("prop3_truthfulness_fuzz", specs, 60, seed, tol);
  if (r.passed) r.detail = "constant-threshold cutoff greedymax: " + r.detail;
  return r;
}

// Three-alternative violation profile for a constant tau = 0.5 cutoff on a
// consecutive-movement phantom family: one voter at (0, 1-eps, eps), the
// rest on the first vertex.
ScenarioResult scenario_prop4_family(const std::string& scenario, const std::string& mech_id,
                                     std::function<double(int)> eps_of_n, std::uint64_t seed,
                                     const Tolerance& tol) {
  const double tau = 0.5;
  MechanismSpec spec = registry_find(mech_id);
  spec.threshold.kind = ThresholdFn::Kind::Constant;
  spec.threshold.tau = tau;
  spec.cutoff = CutoffMode::Aggregate;

  bool any = false;
  std::string detail;
  for (int n : {3, 4}) {
    const double eps = eps_of_n(n);
    std::vector<Allocation> votes = {alloc3(0.0, 1.0 - eps, eps)};
    for (int i = 1; i < n; ++i) votes.push_back(alloc3(1.0, 0.0, 0.0));
    const Profile p = make_profile(votes);

    const Allocation out = apply_mechanism(spec, p, tol);
    const Allocation expected = alloc3(tau, 1.0 - tau - 2.0 * eps, 2.0 * eps);
    if (linf_distance(out, expected) > 1e-9) {
      detail += fmt("aggregate mismatch at n=%.0f; ", n);
      continue;
    }
    const ManipulationResult r = manipulation_search(spec, p, 0, {}, tol, seed);
    if (r.gain >= 1e-4) {
      any = true;
      detail += fmt("n=%.0f: eps=%.6g, gain=%.6g; ", n, eps, r.gain);
    } else {
      detail += fmt("n=%.0f: eps=%.6g, no gain found; ", n, eps);
    }
  }
  return {scenario, any, detail};
}

ScenarioResult scenario_prop4_muw(std::uint64_t seed, const Tolerance& tol) {
  const double tau = 0.5;
  const Profile p = make_profile({alloc3((1 + 3 * tau) / 4, (3 - 3 * tau) / 4, 0.0),
                                  alloc3((1 + tau) / 2, (1 - tau) / 4, (1 - tau) / 4)});
  const ManipulationResult r =
      manipulation_search(registry_find("cutoff_muw"), p, 0, {}, tol, seed);
  const bool passed = r.gain >= 0.0625 - 1e-7;
  return {"prop4_cutoff_muw", passed,
          fmt("manipulation gain %.6g (required >= 0.0625 - 1e-7)", r.gain)};
}

ScenarioResult scenario_thm_slow(std::uint64_t seed, const Tolerance& tol) {
  const std::vector<MechanismSpec> specs = {registry_find("cutoff_im"),
                                            registry_find("cutoff_ladder")};
  ScenarioResult r = fuzz_truthful("thm_slow_cutoff_truthfulness", specs, 50, seed, tol);
  if (r.passed) {
    r.detail = "slow-threshold cutoffs of independent_markets and ladder: " + r.detail;
  }
  return r;
}

ScenarioResult scenario_thm2(std::uint64_t, const Tolerance& tol) {
  bool passed = true;
  std::string detail;
  for (int n = 2; n <= 7 && passed; ++n) {
    for (int m = 2; m <= 6 && passed; ++m) {
      const Profile p = lower_bound_profile(n, m);
      const Allocation center = symmetric_vote(1.0 / m, m);
      const double expected_l1 = n % 2 == 0
                                     ? static_cast<double>(m - 1) / m
                                     : static_cast<double>(m - 1) / m * (n - 1) / n;
      for (const MechanismSpec& spec : registry_list()) {
        if (spec.id == "mean") continue;
        if (spec.id == "votecut_greedymin" && m != 3) continue;
        if (spec.id == "uvcgm" && (n != 2 || m != 3)) continue;
        const Allocation out = apply_mechanism(spec, p, tol);
        if (linf_distance(out, center) > 1e-9) {
          passed = false;
          detail = spec.id + fmt(" is off-center at n=%.0f, m=%.0f", n, m);
          break;
        }
        const FairnessResult f = fairness(spec, p, tol);
        if (std::abs(f.l1 - expected_l1) > 1e-9 || std::abs(f.linf - expected_l1 / 2) > 1e-9) {
          passed = false;
          detail = spec.id + fmt(" distance mismatch at n=%.0f, m=%.0f", n, m);
          break;
        }
      }
    }
  }
  if (passed) {
    detail = "all eligible registry mechanisms output the center on the half-center/"
             "half-vertex profile with the expected mean distances, n in 2..7, m in 2..6";
  }
  return {"thm2_lower_bound_grid", passed, detail};
}

ScenarioResult scenario_appb_uvcgm(std::uint64_t, const Tolerance& tol) {
  const MechanismSpec spec = registry_find("uvcgm");
  const Profile p1 = make_profile({alloc3(0.84, 0.16, 0.0), alloc3(0.7, 0.3, 0.0)});
  const Profile p2 = make_profile({alloc3(0.82, 0.18, 0.0), alloc3(0.7, 0.3, 0.0)});
  const Allocation a1 = apply_mechanism(spec, p1, tol);
  const Allocation a2 = apply_mechanism(spec, p2, tol);
  bool passed = linf_distance(a1, alloc3(0.7, 0.18, 0.12)) <= 1e-9 &&
                linf_distance(a2, alloc3(0.7, 0.19, 0.11)) <= 1e-9;
  std::string detail;
  if (!passed) {
    detail = "unexpected aggregates on the two witness profiles";
  } else {
    const ConsistencyResult c = phantom_family_consistent(p1, a1, p2, a2, tol);
    passed = !c.consistent;
    detail = passed ? "outputs match and no common phantom family fits both profiles"
                    : "consistency check failed to refute a common family: " + c.explanation;
  }
  return {"appB_uvcgm_nonphantom", passed, detail};
}

ScenarioResult scenario_appb_votecut(std::uint64_t, const Tolerance& tol) {
  const MechanismSpec spec = registry_find("votecut_greedymin");
  bool passed = true;
  std::string detail;
  for (int n : {2, 3}) {
    const Profile p =
        make_profile(std::vector<Allocation>(static_cast<std::size_t>(n), alloc3(0.9, 0.1, 0.0)));
    const Allocation out = apply_mechanism(spec, p, tol);
    if (linf_distance(out, alloc3(0.8, 0.15, 0.05)) > 1e-9) {
      passed = false;
      detail = fmt("unexpected unanimous aggregate at n=%.0f", n);
      break;
    }
    const RepresentabilityResult rep = phantom_representable(p, out, tol);
    if (rep.feasible) {
      passed = false;
      detail = fmt("unexpectedly phantom-representable at n=%.0f", n);
      break;
    }
  }
  if (passed) {
    detail = "unanimous extreme report maps to (0.8,0.15,0.05), which no phantom vector "
             "reproduces";
  }
  return {"appB_votecut_nonphantom", passed, detail};
}

using ScenarioFn = ScenarioResult (*)(std::uint64_t, const Tolerance&);

const std::vector<std::pair<std::string, ScenarioFn>>& scenario_table() {
  static const std::vector<std::pair<std::string, ScenarioFn>> table = {
      {"mean_not_truthful", scenario_mean_not_truthful},
      {"prop2_cutoffgreedymax_nonphantom", scenario_prop2},
      {"prop3_truthfulness_fuzz", scenario_prop3},
      {"prop4_cutoff_muw", scenario_prop4_muw},
      {"prop4_cutoff_im",
       [](std::uint64_t seed, const Tolerance& tol) {
         return scenario_prop4_family(
             "prop4_cutoff_im", "cutoff_im",
             [](int n) { return (0.5 * n - 1.0) / (3.0 * n - 1.0); }, seed, tol);
       }},
      {"prop4_cutoff_ladder",
       [](std::uint64_t seed, const Tolerance& tol) {
         return scenario_prop4_family(
             "prop4_cutoff_ladder", "cutoff_ladder",
             [](int n) { return 2.0 * (0.5 * n - 1.0) / (5.0 * n); }, seed, tol);
       }},
      {"prop4_cutoff_piecewise",
       [](std::uint64_t seed, const Tolerance& tol) {
         return scenario_prop4_family(
             "prop4_cutoff_piecewise", "cutoff_piecewise",
             [](int n) { return 2.0 * (0.5 * n - 1.0) / (5.0 * n); }, seed, tol);
       }},
      {"thm_slow_cutoff_truthfulness", scenario_thm_slow},
      {"thm2_lower_bound_grid", scenario_thm2},
      {"appB_uvcgm_nonphantom", scenario_appb_uvcgm},
      {"appB_votecut_nonphantom", scenario_appb_votecut},
  };
  return table;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : scenario_table()) names.push_back(name);
  return names;
}

ScenarioResult run_scenario(const std::string& name, std::uint64_t seed, const Tolerance& tol) {
  for (const auto& [key, fn] : scenario_table()) {
    if (key == name) return fn(seed, tol);
  }
  throw UnknownScenario("unknown scenario: " + name);
}

}  // namespace pforge
