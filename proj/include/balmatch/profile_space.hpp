#pragma once

// Enumeration of the full preference-profile space R^N.
//
// Profiles are indexed in mixed radix n!: agent 1's ranking is the most
// significant digit and each digit is the Lehmer code of that agent's ranking.
// Index 0 is the profile where every agent ranks a > b > c > ...

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "balmatch/core.hpp"

namespace balmatch {

inline constexpr int kDefaultExhaustionLimit = 4;
/// Largest n for which (n!)^n fits the 64-bit index.
inline constexpr int kMaxEnumerable = 6;

class ExhaustionLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads BALMATCH_EXHAUSTION_LIMIT, falling back to kDefaultExhaustionLimit.
int exhaustion_limit();

/// Throws ExhaustionLimitExceeded with a cost estimate when n is above the
/// exhaustion limit.
void require_exhaustive(int n);

struct IndexRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

/// Splits [0, total) into `parts` contiguous ranges whose sizes differ by at most one.
std::vector<IndexRange> split_range(std::uint64_t total, int parts);

class ProfileSpace {
 public:
  /// Accepts any n in [1, kMaxEnumerable]; the exhaustion limit is a policy
  /// applied by callers through require_exhaustive.
  explicit ProfileSpace(int n);

  int n() const { return n_; }
  std::uint64_t size() const { return size_; }

  /// Every ranking, in Lehmer order.
  const std::vector<Preference>& preferences() const { return prefs_; }

  Profile at(std::uint64_t index) const;
  std::uint64_t index_of(const Profile& profile) const;

  /// Calls fn(index, profile) for each index in [begin, end). Iteration stops
  /// early if fn returns false.
  template <class Fn>
  void for_each(std::uint64_t begin, std::uint64_t end, Fn&& fn) const {
    if (begin >= end) return;
    Profile profile = at(begin);
    std::array<std::uint64_t, kMaxSize> digit{};
    std::uint64_t rest = begin;
    for (int i = n_ - 1; i >= 0; --i) {
      digit[static_cast<std::size_t>(i)] = rest % radix_;
      rest /= radix_;
    }
    for (std::uint64_t idx = begin;;) {
      if (!fn(idx, static_cast<const Profile&>(profile))) return;
      if (++idx == end) return;
      for (int i = n_ - 1; i >= 0; --i) {
        auto& d = digit[static_cast<std::size_t>(i)];
        if (++d == radix_) d = 0;
        profile.set(agent(i), prefs_[d]);
        if (d != 0) break;
      }
    }
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for_each(0, size_, std::forward<Fn>(fn));
  }

 private:
  int n_;
  std::uint64_t radix_;
  std::uint64_t size_;
  std::vector<Preference> prefs_;
};

/// The exhaustive profile stream for n, after the exhaustion-limit check.
ProfileSpace enumerate_profiles(int n);

/// Human-readable cost summary, e.g. "(5!)^5 = 24883200000 profiles".
std::string profile_space_cost(int n);

}  // namespace balmatch
