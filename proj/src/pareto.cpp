#include "balmatch/pareto.hpp"

namespace balmatch {

bool pareto_dominates(const Matching& other, const Matching& mu, const Profile& profile) {
  bool strict = false;
  for (int i = 0; i < profile.size(); ++i) {
    const Preference& p = profile.of(i);
    const int now = p.position_of(mu.of(i));
    const int alt = p.position_of(other.of(i));
    if (alt > now) return false;
    if (alt < now) strict = true;
  }
  return strict;
}

namespace {

const std::vector<Matching>& cached_matchings(int n) {
  static const std::array<std::vector<Matching>, 7> cache = [] {
    std::array<std::vector<Matching>, 7> c;
    for (int k = 1; k <= 6; ++k) c[static_cast<std::size_t>(k)] = all_matchings(k);
    return c;
  }();
  return cache[static_cast<std::size_t>(n)];
}

}  // namespace

std::optional<Matching> find_dominating_matching(const Matching& mu, const Profile& profile) {
  if (mu.size() != profile.size()) throw InvalidInput("matching and profile sizes differ");
  const int n = profile.size();
  const auto& candidates = n <= 6 ? cached_matchings(n) : all_matchings(n);
  for (const Matching& other : candidates)
    if (pareto_dominates(other, mu, profile)) return other;
  return std::nullopt;
}

std::vector<Matching> efficient_matchings(const Profile& profile) {
  const int n = profile.size();
  const auto& candidates = n <= 6 ? cached_matchings(n) : all_matchings(n);
  std::vector<Matching> out;
  for (const Matching& mu : candidates)
    if (!find_dominating_matching(mu, profile)) out.push_back(mu);
  return out;
}

}  // namespace balmatch
