#include "pforge/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pforge {

using nlohmann::json;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string pretty_number(double x) {
  for (int q = 1; q <= 24; ++q) {
    const double scaled = x * q;
    const double p = std::round(scaled);
    if (std::abs(scaled - p) <= 1e-9 * q && std::abs(p) <= 1e6) {
      const long long pi = static_cast<long long>(p);
      if (q == 1) return std::to_string(pi);
      // Reduce the fraction for readability.
      long long a = std::llabs(pi), b = q;
      while (b != 0) {
        const long long t = a % b;
        a = b;
        b = t;
      }
      const long long g = a == 0 ? 1 : a;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%lld/%lld", pi / g, q / g);
      return buf;
    }
  }
  return format_number(x);
}

json allocation_to_json(const Allocation& a) { return json(a.values()); }

Allocation allocation_from_json(const json& j, const Tolerance& tol) {
  if (!j.is_array()) throw std::invalid_argument("allocation must be a JSON array");
  return make_allocation(j.get<std::vector<double>>(), tol);
}

json profile_to_json(const Profile& p) {
  json votes = json::array();
  for (const Allocation& v : p.votes) votes.push_back(v.values());
  return json{{"m", p.m}, {"votes", votes}};
}

Profile profile_from_json(const json& j, const Tolerance& tol) {
  if (!j.contains("votes")) throw std::invalid_argument("profile needs a votes array");
  std::vector<Allocation> votes;
  for (const auto& row : j.at("votes")) votes.push_back(allocation_from_json(row, tol));
  Profile p = make_profile(std::move(votes));
  if (j.contains("m") && j.at("m").get<int>() != p.m) {
    throw DimensionMismatch("declared m disagrees with the votes");
  }
  return p;
}

json mechanism_to_json(const MechanismSpec& spec) {
  json base;
  switch (spec.base) {
    case BaseKind::Mean:
      base = "mean";
      break;
    case BaseKind::Phantom:
      base = json{{"phantom", spec.phantom_id}};
      break;
    case BaseKind::GreedyDirectMax:
      base = json{{"greedy_direct", "max"}};
      break;
    case BaseKind::GreedyDirectMin:
      base = json{{"greedy_direct", "min"}};
      break;
  }
  json cutoff;
  const auto threshold_json = [&spec]() {
    if (spec.threshold.kind == ThresholdFn::Kind::Constant) {
      return json{{"kind", "constant"}, {"tau", spec.threshold.tau}};
    }
    return json{{"kind", "slow_derived"}};
  };
  switch (spec.cutoff) {
    case CutoffMode::None:
      cutoff = json{{"kind", "none"}};
      break;
    case CutoffMode::Aggregate:
      cutoff = json{{"kind", "aggregate"}, {"threshold", threshold_json()}};
      break;
    case CutoffMode::PerVote:
      cutoff = json{{"kind", "per_vote"}, {"threshold", threshold_json()}};
      break;
    case CutoffMode::UnanimousPair:
      cutoff = json{{"kind", "unanimous_pair"}};
      break;
  }
  json out{{"id", spec.id}, {"base", base}, {"cutoff", cutoff}};
  if (spec.require_n) out["require_n"] = *spec.require_n;
  if (spec.require_m) out["require_m"] = *spec.require_m;
  if (spec.known_untruthful_constant_tau) out["known_untruthful_constant_tau"] = true;
  if (!spec.note.empty()) out["note"] = spec.note;
  return out;
}

MechanismSpec mechanism_from_json(const json& j) {
  MechanismSpec spec;
  spec.id = j.value("id", "custom");
  const json& base = j.at("base");
  if (base.is_string() && base.get<std::string>() == "mean") {
    spec.base = BaseKind::Mean;
  } else if (base.is_object() && base.contains("phantom")) {
    spec.base = BaseKind::Phantom;
    spec.phantom_id = base.at("phantom").get<std::string>();
  } else if (base.is_object() && base.contains("greedy_direct")) {
    const std::string which = base.at("greedy_direct").get<std::string>();
    if (which == "max") {
      spec.base = BaseKind::GreedyDirectMax;
    } else if (which == "min") {
      spec.base = BaseKind::GreedyDirectMin;
    } else {
      throw std::invalid_argument("greedy_direct must be max or min");
    }
  } else {
    throw std::invalid_argument("unrecognized mechanism base");
  }
  if (j.contains("cutoff")) {
    const json& cutoff = j.at("cutoff");
    const std::string kind = cutoff.value("kind", "none");
    auto read_threshold = [&cutoff, &spec]() {
      const json& th = cutoff.at("threshold");
      if (th.at("kind").get<std::string>() == "constant") {
        spec.threshold.kind = ThresholdFn::Kind::Constant;
        spec.threshold.tau = th.at("tau").get<double>();
      } else {
        spec.threshold.kind = ThresholdFn::Kind::SlowDerived;
        spec.threshold.system_id = spec.phantom_id;
      }
    };
    if (kind == "none") {
      spec.cutoff = CutoffMode::None;
    } else if (kind == "aggregate") {
      spec.cutoff = CutoffMode::Aggregate;
      read_threshold();
    } else if (kind == "per_vote") {
      spec.cutoff = CutoffMode::PerVote;
      read_threshold();
    } else if (kind == "unanimous_pair") {
      spec.cutoff = CutoffMode::UnanimousPair;
      spec.require_n = 2;
      spec.require_m = 3;
    } else {
      throw std::invalid_argument("unrecognized cutoff kind: " + kind);
    }
  }
  if (j.contains("require_n")) spec.require_n = j.at("require_n").get<int>();
  if (j.contains("require_m")) spec.require_m = j.at("require_m").get<int>();
  return spec;
}

PhantomSystem phantom_table_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<double> ts;
  std::vector<std::vector<double>> rows;
  for (const auto& row : j.at("breakpoints")) {
    const auto vals = row.get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != n + 2) {
      throw std::invalid_argument("breakpoint row must be [t, f_0..f_n]");
    }
    ts.push_back(vals.front());
    rows.emplace_back(vals.begin() + 1, vals.end());
  }
  return table_system(j.value("id", "custom_table"), n, std::move(ts), std::move(rows));
}

std::string median_trace_to_csv(const MedianTrace& trace) {
  std::ostringstream out;
  const std::size_t m = trace.medians.empty() ? 0 : trace.medians.front().size();
  out << "t";
  for (std::size_t j = 1; j <= m; ++j) out << ",median_" << j;
  out << ",sum\n";
  for (std::size_t i = 0; i < trace.t_grid.size(); ++i) {
    out << format_number(trace.t_grid[i]);
    for (double med : trace.medians[i]) out << ',' << format_number(med);
    out << ',' << format_number(trace.sums[i]) << '\n';
  }
  return out.str();
}

json verification_report(const std::string& check, const std::string& mechanism,
                         const json& profile, const json& result, const json& witness,
                         const json& stats, std::uint64_t seed) {
  return json{{"check", check},   {"mechanism", mechanism}, {"profile", profile},
              {"result", result}, {"witness", witness},     {"stats", stats},
              {"seed", seed}};
}

}  // namespace pforge
