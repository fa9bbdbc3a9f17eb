#pragma once

// Text codec. Objects are letters a, b, c, ...; agents are 1-based integers.
//
//   preference  "b>c>a"
//   profile     "b>c>a; a>c>b; a>c>b"
//   matching    "(b,a,c)"          agent 1 gets b, agent 2 gets a, ...
//   submatching "1:a,3:c"          "" for the empty submatching

#include <string>
#include <string_view>

#include "balmatch/core.hpp"

namespace balmatch {

std::string object_name(ObjectId x);
ObjectId parse_object(std::string_view token);
std::string agent_name(AgentId i);
AgentId parse_agent(std::string_view token);

std::string format_preference(const Preference& p);
/// Number of objects is inferred from the ranking length.
Preference parse_preference(std::string_view text);

std::string format_profile(const Profile& profile);
Profile parse_profile(std::string_view text);

std::string format_matching(const Matching& mu);
/// Accepts "(b,a,c)" or "b,a,c".
Matching parse_matching(std::string_view text);

Submatching parse_submatching(int n, std::string_view key);

}  // namespace balmatch
