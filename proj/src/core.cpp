#include "balmatch/core.hpp"

#include <algorithm>
#include <numeric>

#include "balmatch/codec.hpp"

namespace balmatch {

void require_size(int n) {
  if (n < 1 || n > kMaxSize)
    throw UnsupportedSize("instance size " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxSize) + "]");
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

namespace {

// Lehmer code of a sequence that is a permutation of {0..n-1}.
template <class Seq>
std::uint64_t lehmer_of(const Seq& seq, int n) {
  std::uint64_t code = 0;
  std::uint32_t used = 0;
  for (int pos = 0; pos < n; ++pos) {
    const int v = static_cast<int>(seq[static_cast<std::size_t>(pos)]);
    const int smaller_unused = v - std::popcount(used & ((1u << v) - 1u));
    code = code * static_cast<std::uint64_t>(n - pos) + static_cast<std::uint64_t>(smaller_unused);
    used |= 1u << v;
  }
  return code;
}

bool is_bijection(std::span<const int> image) {
  const int n = static_cast<int>(image.size());
  std::uint32_t seen = 0;
  for (int v : image) {
    if (v < 0 || v >= n || ((seen >> v) & 1u)) return false;
    seen |= 1u << v;
  }
  return true;
}

}  // namespace

Permutation Permutation::identity(int n) {
  require_size(n);
  Permutation p;
  p.n_ = static_cast<std::uint8_t>(n);
  for (int i = 0; i < n; ++i) p.image_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  return p;
}

Permutation Permutation::from_images(std::span<const int> image) {
  require_size(static_cast<int>(image.size()));
  if (!is_bijection(image)) throw InvalidInput("permutation is not a bijection");
  Permutation p;
  p.n_ = static_cast<std::uint8_t>(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) p.image_[i] = static_cast<std::uint8_t>(image[i]);
  return p;
}

Permutation Permutation::from_lehmer(int n, std::uint64_t code) {
  require_size(n);
  if (code >= factorial(n)) throw InvalidInput("Lehmer code out of range");
  std::array<int, kMaxSize> digits{};
  for (int pos = n - 1; pos >= 0; --pos) {
    const auto radix = static_cast<std::uint64_t>(n - pos);
    digits[static_cast<std::size_t>(pos)] = static_cast<int>(code % radix);
    code /= radix;
  }
  Permutation p;
  p.n_ = static_cast<std::uint8_t>(n);
  std::uint32_t used = 0;
  for (int pos = 0; pos < n; ++pos) {
    int skip = digits[static_cast<std::size_t>(pos)];
    int v = 0;
    for (;; ++v) {
      if ((used >> v) & 1u) continue;
      if (skip-- == 0) break;
    }
    used |= 1u << v;
    p.image_[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
  }
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.n_ = n_;
  for (int i = 0; i < n_; ++i) p.image_[image_[static_cast<std::size_t>(i)]] = static_cast<std::uint8_t>(i);
  return p;
}

std::uint64_t Permutation::lehmer_code() const { return lehmer_of(image_, n_); }

std::vector<int> Permutation::images() const {
  return {image_.begin(), image_.begin() + n_};
}

Preference Preference::from_ranking(std::span<const ObjectId> ranking) {
  require_size(static_cast<int>(ranking.size()));
  Preference p;
  p.n_ = static_cast<std::uint8_t>(ranking.size());
  std::uint32_t seen = 0;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    const int x = index(ranking[pos]);
    if (x >= p.n_ || ((seen >> x) & 1u))
      throw InvalidInput("ranking is not a permutation of the " + std::to_string(p.n_) + " objects");
    seen |= 1u << x;
    p.ranking_[pos] = ranking[pos];
    p.position_[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(pos);
  }
  return p;
}

Preference Preference::from_permutation(const Permutation& perm) {
  Preference p;
  p.n_ = static_cast<std::uint8_t>(perm.size());
  for (int pos = 0; pos < perm.size(); ++pos) {
    p.ranking_[static_cast<std::size_t>(pos)] = object(perm(pos));
    p.position_[static_cast<std::size_t>(perm(pos))] = static_cast<std::uint8_t>(pos);
  }
  return p;
}

Preference Preference::identity(int n) { return from_permutation(Permutation::identity(n)); }

std::uint64_t Preference::lehmer_code() const { return lehmer_of(ranking_, n_); }

Rank rank_of(const Preference& pref, ObjectId x) {
  if (index(x) >= pref.size())
    throw InvalidInput("object " + object_name(x) + " is not ranked by a preference over " +
                       std::to_string(pref.size()) + " objects");
  return Rank{pref.position_of(x) + 1};
}

ObjectId top_in(const Preference& pref, ObjectSet avail) {
  if (avail.empty()) throw InvalidInput("top_in over an empty set of objects");
  for (ObjectId x : pref.ranking())
    if (avail.contains(x)) return x;
  throw InvalidInput("available set contains no ranked object");
}

Profile::Profile(std::span<const Preference> prefs) {
  require_size(static_cast<int>(prefs.size()));
  n_ = static_cast<std::uint8_t>(prefs.size());
  for (std::size_t i = 0; i < prefs.size(); ++i) {
    if (prefs[i].size() != n_)
      throw InvalidInput("profile of " + std::to_string(n_) + " agents has a preference over " +
                         std::to_string(prefs[i].size()) + " objects");
    prefs_[i] = prefs[i];
  }
}

void Profile::set(AgentId i, const Preference& p) {
  if (index(i) >= n_ || p.size() != n_) throw InvalidInput("preference does not fit the profile");
  prefs_[static_cast<std::size_t>(index(i))] = p;
}

Matching Matching::from_assignment(std::span<const ObjectId> assignment) {
  require_size(static_cast<int>(assignment.size()));
  Matching m;
  m.n_ = static_cast<std::uint8_t>(assignment.size());
  std::uint32_t seen = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int x = index(assignment[i]);
    if (x >= m.n_ || ((seen >> x) & 1u)) throw InvalidInput("assignment is not a bijection");
    seen |= 1u << x;
    m.assignment_[i] = assignment[i];
  }
  return m;
}

Matching Matching::identity(int n) {
  require_size(n);
  Matching m;
  m.n_ = static_cast<std::uint8_t>(n);
  for (int i = 0; i < n; ++i) m.assignment_[static_cast<std::size_t>(i)] = object(i);
  return m;
}

AgentId Matching::holder(ObjectId x) const {
  for (int i = 0; i < n_; ++i)
    if (assignment_[static_cast<std::size_t>(i)] == x) return agent(i);
  throw InvalidInput("object " + object_name(x) + " is not assigned");
}

std::vector<Matching> all_matchings(int n) {
  require_size(n);
  std::vector<Matching> out;
  out.reserve(factorial(n));
  std::vector<ObjectId> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = object(i);
  do {
    out.push_back(Matching::from_assignment(a));
  } while (std::next_permutation(a.begin(), a.end()));
  return out;
}

Matching relabel(const Matching& mu, const Permutation& object_map) {
  if (object_map.size() != mu.size()) throw InvalidInput("object map size mismatch");
  std::array<ObjectId, kMaxSize> a{};
  for (int i = 0; i < mu.size(); ++i) a[static_cast<std::size_t>(i)] = object(object_map(index(mu.of(i))));
  return Matching::from_assignment(std::span<const ObjectId>(a.data(), static_cast<std::size_t>(mu.size())));
}

Submatching::Submatching(int n) {
  require_size(n);
  n_ = static_cast<std::uint8_t>(n);
}

ObjectId Submatching::object_of(AgentId i) const {
  const auto v = object_of_[static_cast<std::size_t>(index(i))];
  if (v < 0) throw InvalidInput("agent is unmatched");
  return object(v);
}

AgentSet Submatching::unmatched_agents() const {
  AgentSet s;
  for (int i = 0; i < n_; ++i)
    if (object_of_[static_cast<std::size_t>(i)] < 0) s.insert(agent(i));
  return s;
}

ObjectSet Submatching::unmatched_objects() const {
  ObjectSet s = ObjectSet::full(n_);
  for (ObjectId x : matched_objects_.members()) s.erase(x);
  return s;
}

void Submatching::assign(AgentId i, ObjectId x) {
  if (index(i) >= n_ || index(x) >= n_) throw InvalidInput("pair outside the instance");
  if (matched(i) || object_matched(x))
    throw InvalidInput("pair " + std::to_string(index(i) + 1) + ":" + object_name(x) +
                       " conflicts with the submatching");
  object_of_[static_cast<std::size_t>(index(i))] = static_cast<std::int8_t>(index(x));
  matched_objects_.insert(x);
}

bool Submatching::contains(const Submatching& smaller) const {
  if (smaller.n_ != n_) return false;
  for (int i = 0; i < n_; ++i) {
    const auto v = smaller.object_of_[static_cast<std::size_t>(i)];
    if (v >= 0 && object_of_[static_cast<std::size_t>(i)] != v) return false;
  }
  return true;
}

Matching Submatching::to_matching() const {
  if (!complete()) throw InvalidInput("submatching is not a complete matching");
  std::array<ObjectId, kMaxSize> a{};
  for (int i = 0; i < n_; ++i) a[static_cast<std::size_t>(i)] = object(object_of_[static_cast<std::size_t>(i)]);
  return Matching::from_assignment(std::span<const ObjectId>(a.data(), n_));
}

std::string Submatching::key() const {
  std::string out;
  for (int i = 0; i < n_; ++i) {
    const auto v = object_of_[static_cast<std::size_t>(i)];
    if (v < 0) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(i + 1) + ":" + object_name(object(v));
  }
  return out;
}

Profile permute_agents(const Profile& profile, const Permutation& pi) {
  if (pi.size() != profile.size()) throw InvalidInput("agent permutation size mismatch");
  Profile out = profile;
  for (int k = 0; k < profile.size(); ++k) out.set(agent(k), profile.of(pi(k)));
  return out;
}

namespace {

Preference transpose(const Preference& p, ObjectId x, ObjectId y) {
  std::array<ObjectId, kMaxSize> r{};
  for (int pos = 0; pos < p.size(); ++pos) {
    ObjectId v = p.at(pos);
    if (v == x)
      v = y;
    else if (v == y)
      v = x;
    r[static_cast<std::size_t>(pos)] = v;
  }
  return Preference::from_ranking(std::span<const ObjectId>(r.data(), static_cast<std::size_t>(p.size())));
}

}  // namespace

Profile swap_objects_in_profile(const Profile& profile, ObjectId x, ObjectId y, AgentId i, AgentId j) {
  const int n = profile.size();
  if (x == y) throw InvalidInput("swap_objects_in_profile needs two distinct objects");
  if (i == j) throw InvalidInput("swap_objects_in_profile needs two distinct agents");
  if (index(x) >= n || index(y) >= n || index(i) >= n || index(j) >= n)
    throw InvalidInput("swap_objects_in_profile argument outside the instance");
  Profile out = profile;
  for (int h = 0; h < n; ++h) {
    int source = h;
    if (h == index(i))
      source = index(j);
    else if (h == index(j))
      source = index(i);
    out.set(agent(h), transpose(profile.of(source), x, y));
  }
  return out;
}

Profile relabel_objects(const Profile& profile, const Permutation& pi) {
  if (pi.size() != profile.size()) throw InvalidInput("object permutation size mismatch");
  const Permutation inv = pi.inverse();
  Profile out = profile;
  std::array<ObjectId, kMaxSize> r{};
  for (int i = 0; i < profile.size(); ++i) {
    const Preference& p = profile.of(i);
    for (int pos = 0; pos < p.size(); ++pos) r[static_cast<std::size_t>(pos)] = object(inv(index(p.at(pos))));
    out.set(agent(i), Preference::from_ranking(std::span<const ObjectId>(r.data(), static_cast<std::size_t>(p.size()))));
  }
  return out;
}

}  // namespace balmatch
