#include "pforge/mechanisms.hpp"

namespace pforge {

Allocation mean_allocation(const Profile& p) {
  std::vector<double> out(static_cast<std::size_t>(p.m), 0.0);
  for (const Allocation& v : p.votes) {
    for (int j = 0; j < p.m; ++j) out[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
  }
  for (double& x : out) x /= p.n();
  return make_allocation(std::move(out));
}

Allocation apply_mechanism(const MechanismSpec& spec, const Profile& p, const Tolerance& tol) {
  if (spec.require_n && p.n() != *spec.require_n) {
    throw DimensionConstraint(spec.id + " requires n = " + std::to_string(*spec.require_n));
  }
  if (spec.require_m && p.m != *spec.require_m) {
    throw DimensionConstraint(spec.id + " requires m = " + std::to_string(*spec.require_m));
  }

  Profile input = p;
  if (spec.cutoff == CutoffMode::PerVote) {
    input = vote_cutoff(p, spec.threshold.evaluate(p.n(), p.m), tol);
  } else if (spec.cutoff == CutoffMode::UnanimousPair) {
    if (p.n() != 2) throw DimensionConstraint("unanimous pairwise cutoff requires n = 2");
    input.votes[0] = unanimous_vote_cutoff(p.votes[0], p.votes[1]);
    input.votes[1] = unanimous_vote_cutoff(p.votes[1], p.votes[0]);
  }

  Allocation a;
  switch (spec.base) {
    case BaseKind::Mean:
      a = mean_allocation(input);
      break;
    case BaseKind::Phantom:
      a = run_moving_phantom(builtin_system(spec.phantom_id, input.n()), input, tol);
      break;
    case BaseKind::GreedyDirectMax:
      a = greedy_max_direct(input);
      break;
    case BaseKind::GreedyDirectMin:
      a = greedy_min_direct(input);
      break;
  }

  if (spec.cutoff == CutoffMode::Aggregate) {
    a = aggregate_cutoff(a, spec.threshold.evaluate(p.n(), p.m), tol);
  }
  return a;
}

namespace {

MechanismSpec phantom_entry(std::string id, std::string system) {
  MechanismSpec s;
  s.id = std::move(id);
  s.base = BaseKind::Phantom;
  s.phantom_id = std::move(system);
  return s;
}

std::vector<MechanismSpec> build_registry() {
  std::vector<MechanismSpec> r;

  MechanismSpec mean;
  mean.id = "mean";
  mean.base = BaseKind::Mean;
  r.push_back(mean);

  r.push_back(phantom_entry("greedymax", "greedymax"));
  r.push_back(phantom_entry("greedymin", "greedymin"));
  r.push_back(phantom_entry("max_utilitarian_welfare", "max_utilitarian_welfare"));
  r.push_back(phantom_entry("independent_markets", "independent_markets"));
  r.push_back(phantom_entry("ladder", "ladder"));
  r.push_back(phantom_entry("piecewise_uniform", "piecewise_uniform"));

  auto aggregate_cut = [](MechanismSpec s, ThresholdFn th) {
    s.cutoff = CutoffMode::Aggregate;
    s.threshold = th;
    return s;
  };
  ThresholdFn half;
  half.kind = ThresholdFn::Kind::Constant;
  half.tau = 0.5;

  r.push_back(aggregate_cut(phantom_entry("cutoff_greedymax", "greedymax"), half));

  ThresholdFn slow_im;
  slow_im.kind = ThresholdFn::Kind::SlowDerived;
  slow_im.system_id = "independent_markets";
  r.push_back(aggregate_cut(phantom_entry("cutoff_im", "independent_markets"), slow_im));

  ThresholdFn slow_ladder;
  slow_ladder.kind = ThresholdFn::Kind::SlowDerived;
  slow_ladder.system_id = "ladder";
  r.push_back(aggregate_cut(phantom_entry("cutoff_ladder", "ladder"), slow_ladder));

  MechanismSpec cmuw = aggregate_cut(phantom_entry("cutoff_muw", "max_utilitarian_welfare"), half);
  cmuw.known_untruthful_constant_tau = true;
  cmuw.note = "manipulable with a constant threshold";
  r.push_back(cmuw);

  MechanismSpec cpw = aggregate_cut(phantom_entry("cutoff_piecewise", "piecewise_uniform"), half);
  cpw.known_untruthful_constant_tau = true;
  cpw.note = "manipulable with a constant threshold";
  r.push_back(cpw);

  MechanismSpec vcut = phantom_entry("votecut_greedymin", "greedymin");
  vcut.cutoff = CutoffMode::PerVote;
  vcut.threshold.kind = ThresholdFn::Kind::Constant;
  vcut.threshold.tau = 0.8;
  vcut.note = "truthfulness established for m = 3 only";
  r.push_back(vcut);

  MechanismSpec uvcgm = phantom_entry("uvcgm", "greedymin");
  uvcgm.cutoff = CutoffMode::UnanimousPair;
  uvcgm.require_n = 2;
  uvcgm.require_m = 3;
  r.push_back(uvcgm);

  return r;
}

}  // namespace

const std::vector<MechanismSpec>& registry_list() {
  static const std::vector<MechanismSpec> registry = build_registry();
  return registry;
}

MechanismSpec registry_find(const std::string& id) {
  for (const MechanismSpec& s : registry_list()) {
    if (s.id == id) return s;
  }
  throw UnknownMechanism("unknown mechanism: " + id);
}

}  // namespace pforge
