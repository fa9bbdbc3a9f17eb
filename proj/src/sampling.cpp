#include "balmatch/sampling.hpp"

#include <limits>

namespace balmatch {

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

Preference random_preference(int n, std::mt19937_64& rng) {
  std::array<ObjectId, kMaxSize> r{};
  for (int k = 0; k < n; ++k) r[static_cast<std::size_t>(k)] = object(k);
  for (int k = n - 1; k > 0; --k) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(k + 1)));
    std::swap(r[static_cast<std::size_t>(k)], r[j]);
  }
  return Preference::from_ranking(std::span<const ObjectId>(r.data(), static_cast<std::size_t>(n)));
}

Profile random_profile(int n, std::mt19937_64& rng) {
  std::array<Preference, kMaxSize> prefs{};
  for (int i = 0; i < n; ++i) prefs[static_cast<std::size_t>(i)] = random_preference(n, rng);
  return Profile(std::span<const Preference>(prefs.data(), static_cast<std::size_t>(n)));
}

}  // namespace balmatch
