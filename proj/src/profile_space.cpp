#include "balmatch/profile_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace balmatch {

int exhaustion_limit() {
  if (const char* env = std::getenv("BALMATCH_EXHAUSTION_LIMIT")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, kMaxEnumerable));
  }
  return kDefaultExhaustionLimit;
}

std::string profile_space_cost(int n) {
  std::ostringstream out;
  out << "(" << n << "!)^" << n << " = ";
  if (n <= kMaxEnumerable) {
    std::uint64_t size = 1;
    for (int i = 0; i < n; ++i) size *= factorial(n);
    out << size;
  } else {
    out << std::pow(static_cast<double>(factorial(n)), n);
  }
  out << " profiles";
  return out.str();
}

void require_exhaustive(int n) {
  const int limit = exhaustion_limit();
  if (n > limit)
    throw ExhaustionLimitExceeded("exhaustive enumeration at n=" + std::to_string(n) + " needs " +
                                  profile_space_cost(n) + "; the exhaustion limit is n=" +
                                  std::to_string(limit) +
                                  " (set BALMATCH_EXHAUSTION_LIMIT to raise it) or use sample mode");
}

std::vector<IndexRange> split_range(std::uint64_t total, int parts) {
  if (parts < 1) parts = 1;
  std::vector<IndexRange> out;
  const auto p = static_cast<std::uint64_t>(parts);
  const std::uint64_t base = total / p, extra = total % p;
  std::uint64_t at = 0;
  for (std::uint64_t k = 0; k < p; ++k) {
    const std::uint64_t len = base + (k < extra ? 1 : 0);
    out.push_back({at, at + len});
    at += len;
  }
  return out;
}

ProfileSpace::ProfileSpace(int n) : n_(n) {
  require_size(n);
  if (n > kMaxEnumerable)
    throw UnsupportedSize("profile space at n=" + std::to_string(n) + " does not fit a 64-bit index");
  radix_ = factorial(n);
  size_ = 1;
  for (int i = 0; i < n; ++i) size_ *= radix_;
  prefs_.reserve(radix_);
  for (std::uint64_t code = 0; code < radix_; ++code)
    prefs_.push_back(Preference::from_permutation(Permutation::from_lehmer(n, code)));
}

Profile ProfileSpace::at(std::uint64_t idx) const {
  if (idx >= size_) throw InvalidInput("profile index out of range");
  std::array<Preference, kMaxSize> prefs{};
  for (int i = n_ - 1; i >= 0; --i) {
    prefs[static_cast<std::size_t>(i)] = prefs_[idx % radix_];
    idx /= radix_;
  }
  return Profile(std::span<const Preference>(prefs.data(), static_cast<std::size_t>(n_)));
}

std::uint64_t ProfileSpace::index_of(const Profile& profile) const {
  if (profile.size() != n_) throw InvalidInput("profile size does not match the space");
  std::uint64_t idx = 0;
  for (int i = 0; i < n_; ++i) idx = idx * radix_ + profile.of(i).lehmer_code();
  return idx;
}

ProfileSpace enumerate_profiles(int n) {
  require_size(n);
  require_exhaustive(n);
  return ProfileSpace(n);
}

}  // namespace balmatch
