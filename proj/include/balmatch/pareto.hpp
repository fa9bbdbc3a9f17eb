#pragma once

#include <optional>

#include "balmatch/core.hpp"

namespace balmatch {

/// True if every agent finds `other` at least as good as `mu` and someone
/// strictly prefers it.
bool pareto_dominates(const Matching& other, const Matching& mu, const Profile& profile);

/// First matching (in all_matchings order) that Pareto-dominates mu, if any.
std::optional<Matching> find_dominating_matching(const Matching& mu, const Profile& profile);

/// Efficient matchings for the profile, by brute force over all n! matchings.
std::vector<Matching> efficient_matchings(const Profile& profile);

}  // namespace balmatch
