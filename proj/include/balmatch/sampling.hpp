#pragma once

// Seeded uniform sampling of profiles.
//
// Samples are grouped in fixed-size blocks; block k draws from an engine
// seeded with (seed, k). Any split of the blocks across workers therefore
// reproduces the same sample sequence.

#include <algorithm>
#include <cstdint>
#include <random>

#include "balmatch/core.hpp"

namespace balmatch {

inline constexpr std::uint64_t kSampleBlock = 4096;

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block);

/// Uniform integer in [0, bound), by rejection (bound >= 1).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Uniform random ranking (Fisher-Yates).
Preference random_preference(int n, std::mt19937_64& rng);
Profile random_profile(int n, std::mt19937_64& rng);

inline std::uint64_t block_count(std::uint64_t samples) { return (samples + kSampleBlock - 1) / kSampleBlock; }

/// Calls fn(sample_index, rng) for every sample in blocks [first_block, last_block).
template <class Fn>
void for_each_sample(std::uint64_t samples, std::uint64_t seed, std::uint64_t first_block, std::uint64_t last_block,
                     Fn&& fn) {
  for (std::uint64_t block = first_block; block < last_block; ++block) {
    auto rng = block_engine(seed, block);
    const std::uint64_t begin = block * kSampleBlock;
    const std::uint64_t end = std::min(samples, begin + kSampleBlock);
    for (std::uint64_t s = begin; s < end; ++s)
      if (!fn(s, rng)) return;
  }
}

}  // namespace balmatch
