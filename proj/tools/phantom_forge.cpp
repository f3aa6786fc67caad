#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pforge/json_io.hpp"
#include "pforge/verify.hpp"

namespace {

using nlohmann::json;
using namespace pforge;

constexpr int kExitCheckFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitDimensionError = 3;
constexpr int kExitUnknownTarget = 4;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = kDefaultSeed;
  double eps_gain = Tolerance{}.eps_gain;
  std::string format = "pretty";
  std::string out_path;

  std::string mech;
  std::string profile_path;
  std::string profile_inline;
  std::string profile2_path;
  std::string vote_inline;
  std::string allocation_inline;
  std::string scenario;
  std::string check_kind;
  int voter = 1;  // 1-based
  int trials = 50;
  int grid = 101;
  bool expect_violation = false;

  Tolerance tolerance() const {
    Tolerance t;
    t.eps_gain = eps_gain;
    return t;
  }
};

json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON for " + what);
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

Profile load_profile(const Options& opt) {
  if (opt.profile_path.empty() == opt.profile_inline.empty()) {
    throw ParseError("provide exactly one of --profile and --profile-inline");
  }
  const json j = opt.profile_inline.empty() ? load_json_file(opt.profile_path)
                                            : parse_json_text(opt.profile_inline, "profile");
  try {
    return profile_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad profile: ") + e.what());
  }
}

MechanismSpec load_mechanism(const std::string& mech) {
  if (mech.empty()) throw ParseError("--mech is required");
  if (mech.front() == '{') {
    try {
      return mechanism_from_json(parse_json_text(mech, "mechanism"));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad mechanism JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("bad mechanism JSON: ") + e.what());
    }
  }
  try {
    return registry_find(mech);
  } catch (const UnknownMechanism& e) {
    throw ParseError(e.what());
  }
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opt.out_path);
  if (!out) throw ParseError("cannot write to " + opt.out_path);
  out << text;
}

std::string pretty_allocation(const Allocation& a) {
  std::string s = "(";
  for (int j = 0; j < a.m(); ++j) {
    if (j > 0) s += ", ";
    s += pretty_number(a[static_cast<std::size_t>(j)]);
  }
  return s + ")";
}

std::string csv_allocation(const Allocation& a) {
  std::string s;
  for (int j = 0; j < a.m(); ++j) {
    if (j > 0) s += ',';
    s += format_number(a[static_cast<std::size_t>(j)]);
  }
  return s;
}

int cmd_aggregate(const Options& opt) {
  const MechanismSpec spec = load_mechanism(opt.mech);
  const Profile p = load_profile(opt);
  const Allocation a = apply_mechanism(spec, p, opt.tolerance());
  if (opt.format == "json") {
    json j{{"mechanism", spec.id}, {"profile", profile_to_json(p)},
           {"allocation", allocation_to_json(a)}};
    emit(opt, j.dump(2));
  } else if (opt.format == "csv") {
    emit(opt, csv_allocation(a));
  } else {
    emit(opt, pretty_allocation(a));
  }
  return 0;
}

int cmd_check(const Options& opt) {
  const Tolerance tol = opt.tolerance();
  const std::string& kind = opt.check_kind;
  const MechanismSpec spec = load_mechanism(opt.mech);

  bool violation_possible = true;  // whether --expect-violation makes sense
  bool passed = false;
  json result;
  json witness;
  json stats;
  json profile_json;

  if (kind == "anonymity" || kind == "neutrality") {
    const Profile p = load_profile(opt);
    profile_json = profile_to_json(p);
    const bool ok = kind == "anonymity"
                        ? check_anonymity(spec, p, opt.trials, opt.seed, tol)
                        : check_neutrality(spec, p, opt.trials, opt.seed, tol);
    passed = ok;
    result = json{{"holds", ok}};
    stats = json{{"trials", opt.trials}};
  } else if (kind == "unanimity") {
    if (opt.vote_inline.empty()) throw ParseError("unanimity check needs --vote");
    const Allocation v = allocation_from_json(parse_json_text(opt.vote_inline, "vote"), tol);
    const bool ok = check_unanimity(spec, v, 2, tol);
    passed = ok;
    result = json{{"holds", ok}};
    profile_json = json{{"unanimous_vote", allocation_to_json(v)}};
  } else if (kind == "continuity") {
    const Profile p = load_profile(opt);
    profile_json = profile_to_json(p);
    const ContinuityReport report =
        continuity_probe(spec, p, {0.1, 0.01, 0.001}, opt.trials, opt.seed, tol);
    passed = !report.divergence_flag;
    result = json{{"deltas", report.deltas},
                  {"max_ratio", report.max_ratio},
                  {"divergence_flag", report.divergence_flag}};
    stats = json{{"trials", opt.trials}};
  } else if (kind == "truthfulness") {
    const Profile p = load_profile(opt);
    profile_json = profile_to_json(p);
    if (opt.voter < 1 || opt.voter > p.n()) throw ParseError("--voter out of range");
    const ManipulationResult r = manipulation_search(spec, p, opt.voter - 1, {}, tol, opt.seed);
    const bool violated = r.gain > tol.eps_gain;
    passed = !violated;
    result = json{{"voter", opt.voter},
                  {"truthful_disutility", r.truthful_disutility},
                  {"best_disutility", r.best_disutility},
                  {"gain", r.gain},
                  {"violation_found", violated},
                  {"verdict", violated ? "violation found"
                                       : "no violation found (bounded search, not a proof)"}};
    witness = allocation_to_json(r.best_misreport);
    stats = json{{"candidates", r.stats.candidates},
                 {"refinement_rounds", r.stats.refinement_rounds}};
  } else if (kind == "fairness") {
    const Profile p = load_profile(opt);
    profile_json = profile_to_json(p);
    const FairnessResult f = fairness(spec, p, tol);
    passed = true;
    violation_possible = false;
    result = json{{"l1", f.l1}, {"linf", f.linf}};
  } else if (kind == "representability") {
    const Profile p = load_profile(opt);
    profile_json = profile_to_json(p);
    const Allocation a =
        opt.allocation_inline.empty()
            ? apply_mechanism(spec, p, tol)
            : allocation_from_json(parse_json_text(opt.allocation_inline, "allocation"), tol);
    const RepresentabilityResult r = phantom_representable(p, a, tol);
    passed = r.feasible;
    result = json{{"feasible", r.feasible}, {"allocation", allocation_to_json(a)}};
    if (!r.feasible) result["blocking_explanation"] = r.blocking_explanation;
    if (r.witness) witness = *r.witness;
    stats = json{{"candidate_values", r.candidate_set.size()}};
  } else if (kind == "family-consistency") {
    const Profile p = load_profile(opt);
    if (opt.profile2_path.empty()) throw ParseError("family-consistency needs --profile2");
    const Profile p2 = profile_from_json(load_json_file(opt.profile2_path), tol);
    profile_json = json{{"first", profile_to_json(p)}, {"second", profile_to_json(p2)}};
    const Allocation a1 = apply_mechanism(spec, p, tol);
    const Allocation a2 = apply_mechanism(spec, p2, tol);
    const ConsistencyResult c = phantom_family_consistent(p, a1, p2, a2, tol);
    passed = c.consistent;
    result = json{{"consistent", c.consistent},
                  {"explanation", c.explanation},
                  {"allocations", json::array({allocation_to_json(a1), allocation_to_json(a2)})}};
  } else {
    throw UnknownTarget("unknown check: " + kind);
  }

  const json report =
      verification_report(kind, spec.id, profile_json, result, witness, stats, opt.seed);
  if (opt.format == "json") {
    emit(opt, report.dump(2));
  } else {
    std::ostringstream text;
    text << "check: " << kind << "\nmechanism: " << spec.id << "\n";
    for (const auto& [key, value] : result.items()) {
      if (value.is_number()) {
        text << key << ": " << pretty_number(value.get<double>()) << "\n";
      } else {
        text << key << ": " << value.dump() << "\n";
      }
    }
    emit(opt, text.str());
  }

  if (opt.expect_violation && violation_possible) return passed ? kExitCheckFailed : 0;
  return passed ? 0 : kExitCheckFailed;
}

int cmd_repro(const Options& opt) {
  std::vector<std::string> names;
  if (opt.scenario == "all") {
    names = scenario_names();
  } else {
    names.push_back(opt.scenario);
  }
  bool all_passed = true;
  json rows = json::array();
  std::ostringstream table;
  for (const std::string& name : names) {
    const ScenarioResult r = run_scenario(name, opt.seed, opt.tolerance());
    all_passed = all_passed && r.passed;
    rows.push_back(json{{"scenario", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    table << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
  }
  if (opt.format == "json") {
    emit(opt, json{{"scenarios", rows}, {"seed", opt.seed}}.dump(2));
  } else {
    emit(opt, table.str());
  }
  return all_passed ? 0 : kExitCheckFailed;
}

int cmd_trace(const Options& opt) {
  const MechanismSpec spec = load_mechanism(opt.mech);
  if (spec.base != BaseKind::Phantom) {
    std::cerr << "trace requires a phantom-based mechanism\n";
    return kExitDimensionError;
  }
  const Profile p = load_profile(opt);
  if (opt.grid < 2) throw ParseError("--grid must be >= 2");
  const PhantomSystem system = builtin_system(spec.phantom_id, p.n());
  MedianTrace trace = median_trace(system, p, opt.grid);
  // Insert a row at the solved normalization time.
  const double tstar = normalization_time(system, p, opt.tolerance());
  const std::vector<double> meds = medians_at(system, p, tstar);
  double sum = 0.0;
  for (double x : meds) sum += x;
  auto it = std::lower_bound(trace.t_grid.begin(), trace.t_grid.end(), tstar);
  const std::size_t pos = static_cast<std::size_t>(it - trace.t_grid.begin());
  trace.t_grid.insert(trace.t_grid.begin() + static_cast<std::ptrdiff_t>(pos), tstar);
  trace.medians.insert(trace.medians.begin() + static_cast<std::ptrdiff_t>(pos), meds);
  trace.sums.insert(trace.sums.begin() + static_cast<std::ptrdiff_t>(pos), sum);
  emit(opt, median_trace_to_csv(trace));
  return 0;
}

int cmd_list(const Options& opt) {
  if (opt.format == "json") {
    json rows = json::array();
    for (const MechanismSpec& spec : registry_list()) rows.push_back(mechanism_to_json(spec));
    emit(opt, rows.dump(2));
    return 0;
  }
  std::ostringstream text;
  for (const MechanismSpec& spec : registry_list()) {
    text << spec.id;
    if (spec.require_n || spec.require_m) {
      text << " (";
      if (spec.require_n) text << "n=" << *spec.require_n;
      if (spec.require_n && spec.require_m) text << ", ";
      if (spec.require_m) text << "m=" << *spec.require_m;
      text << ")";
    }
    if (!spec.note.empty()) text << " -- " << spec.note;
    text << "\n";
  }
  emit(opt, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  if (const char* env_seed = std::getenv("PHANTOM_FORGE_SEED")) {
    opt.seed = std::strtoull(env_seed, nullptr, 10);
  }

  CLI::App app{"budget-aggregation mechanisms, cutoffs, and verification"};
  app.require_subcommand(1);
  app.add_option("--seed", opt.seed, "RNG seed for randomized checks");
  app.add_option("--eps-gain", opt.eps_gain, "manipulation gain margin");
  app.add_option("--format", opt.format, "output format: json|csv|pretty")
      ->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--out", opt.out_path, "write output to this path");

  auto add_profile_opts = [&opt](CLI::App* cmd) {
    cmd->add_option("--profile", opt.profile_path, "profile JSON file");
    cmd->add_option("--profile-inline", opt.profile_inline, "profile JSON text");
  };

  CLI::App* agg = app.add_subcommand("aggregate", "run a mechanism on a profile");
  agg->add_option("--mech", opt.mech, "registry id or inline mechanism JSON")->required();
  add_profile_opts(agg);

  CLI::App* check = app.add_subcommand("check", "run one verification procedure");
  check->add_option("kind", opt.check_kind,
                    "anonymity|neutrality|unanimity|continuity|truthfulness|fairness|"
                    "representability|family-consistency")
      ->required();
  check->add_option("--mech", opt.mech, "registry id or inline mechanism JSON")->required();
  add_profile_opts(check);
  check->add_option("--profile2", opt.profile2_path, "second profile (family-consistency)");
  check->add_option("--vote", opt.vote_inline, "vote JSON array (unanimity)");
  check->add_option("--allocation", opt.allocation_inline,
                    "allocation JSON array (representability target)");
  check->add_option("--voter", opt.voter, "1-based voter index (truthfulness)");
  check->add_option("--trials", opt.trials, "randomized trials");
  check->add_flag("--expect-violation", opt.expect_violation,
                  "exit 0 iff a violation is found");

  CLI::App* repro = app.add_subcommand("repro", "reproduce a named scenario");
  repro->add_option("scenario", opt.scenario, "scenario name or 'all'")->required();

  CLI::App* trace = app.add_subcommand("trace", "export median trace CSV");
  trace->add_option("--mech", opt.mech, "phantom-based registry id or mechanism JSON")->required();
  add_profile_opts(trace);
  trace->add_option("--grid", opt.grid, "number of evenly spaced t values");

  CLI::App* list = app.add_subcommand("list-mechanisms", "print the mechanism registry");
  (void)list;
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParseError;
  }

  try {
    if (agg->parsed()) return cmd_aggregate(opt);
    if (check->parsed()) return cmd_check(opt);
    if (repro->parsed()) return cmd_repro(opt);
    if (trace->parsed()) return cmd_trace(opt);
    return cmd_list(opt);
  } catch (const UnknownTarget& e) {
    std::cerr << e.what() << "\n";
    return kExitUnknownTarget;
  } catch (const UnknownScenario& e) {
    std::cerr << e.what() << "\n";
    return kExitUnknownTarget;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const SumOutOfRange& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const NegativeEntry& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const InvalidPermutation& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const UnknownSystem& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const DimensionConstraint& e) {
    std::cerr << e.what() << "\n";
    return kExitDimensionError;
  } catch (const DimensionMismatch& e) {
    std::cerr << e.what() << "\n";
    return kExitDimensionError;
  } catch (const UnsupportedDimension& e) {
    std::cerr << e.what() << "\n";
    return kExitDimensionError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }
}
