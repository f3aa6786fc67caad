#pragma once

#include <string>

#include <json.hpp>

#include "pforge/core.hpp"
#include "pforge/mechanisms.hpp"
#include "pforge/phantoms.hpp"
#include "pforge/verify.hpp"

namespace pforge {

nlohmann::json allocation_to_json(const Allocation& a);
Allocation allocation_from_json(const nlohmann::json& j, const Tolerance& tol = {});

// Schema: {"m": <int>, "votes": [[<real>...], ...]}.
nlohmann::json profile_to_json(const Profile& p);
Profile profile_from_json(const nlohmann::json& j, const Tolerance& tol = {});

// Schema: {"id":..., "base":"mean"|{"phantom":id}|{"greedy_direct":"max"|"min"},
//          "cutoff":{"kind":..., "threshold":{"kind":"constant","tau":x}|{"kind":"slow_derived"}}}.
nlohmann::json mechanism_to_json(const MechanismSpec& spec);
MechanismSpec mechanism_from_json(const nlohmann::json& j);

// Schema: {"id":..., "n":..., "breakpoints":[[t, f_0..f_n], ...]}.
PhantomSystem phantom_table_from_json(const nlohmann::json& j);

std::string median_trace_to_csv(const MedianTrace& trace);

// Envelope for all verification outputs:
// {check, mechanism, profile, result, witness, stats, seed}.
nlohmann::json verification_report(const std::string& check, const std::string& mechanism,
                                   const nlohmann::json& profile, const nlohmann::json& result,
                                   const nlohmann::json& witness, const nlohmann::json& stats,
                                   std::uint64_t seed);

// Prints p/q when the value is within 1e-9 of a fraction with q <= 24,
// else 12 significant digits.
std::string pretty_number(double x);

// 12 significant digits, shortest form.
std::string format_number(double x);

}  // namespace pforge
