#pragma once

// Domain types for house allocation: agents, objects, strict preferences,
// profiles, matchings and submatchings.
//
// Everything here is a small fixed-capacity value type. Instances hold at most
// kMaxSize agents/objects, which keeps profiles allocation-free inside the
// exhaustive verification loops.

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace balmatch {

inline constexpr int kMaxSize = 8;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class AgentId : std::uint8_t {};
enum class ObjectId : std::uint8_t {};

constexpr int index(AgentId a) { return static_cast<int>(a); }
constexpr int index(ObjectId x) { return static_cast<int>(x); }
constexpr AgentId agent(int i) { return static_cast<AgentId>(i); }
constexpr ObjectId object(int x) { return static_cast<ObjectId>(x); }

void require_size(int n);

/// Position of an object in a ranking, 1 = top choice.
///
/// The bottom-up index used in the literature (the best object is index n)
/// is available through paper_index().
struct Rank {
  int value = 1;

  constexpr int paper_index(int n) const { return n + 1 - value; }
  friend constexpr auto operator<=>(Rank, Rank) = default;
};

/// Bitmask set over indices in [0, kMaxSize). Used for both agents and objects.
template <class Id>
class IdSet {
 public:
  constexpr IdSet() = default;

  static constexpr IdSet full(int n) {
    IdSet s;
    s.bits_ = static_cast<std::uint32_t>((1u << n) - 1u);
    return s;
  }

  constexpr bool contains(Id id) const { return (bits_ >> index(id)) & 1u; }
  constexpr void insert(Id id) { bits_ |= 1u << index(id); }
  constexpr void erase(Id id) { bits_ &= ~(1u << index(id)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint32_t bits() const { return bits_; }

  /// Lowest member; the set must be nonempty.
  constexpr Id first() const { return static_cast<Id>(std::countr_zero(bits_)); }

  std::vector<Id> members() const {
    std::vector<Id> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1)
      out.push_back(static_cast<Id>(std::countr_zero(b)));
    return out;
  }

  friend constexpr auto operator<=>(IdSet, IdSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

using AgentSet = IdSet<AgentId>;
using ObjectSet = IdSet<ObjectId>;

/// Bijection on {0, ..., n-1}. Acts on agents or objects depending on context.
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n);
  /// Throws InvalidInput unless `image` is a bijection on {0..n-1}.
  static Permutation from_images(std::span<const int> image);
  /// The permutation with the given Lehmer code (lexicographic rank).
  static Permutation from_lehmer(int n, std::uint64_t code);

  int size() const { return n_; }
  int operator()(int i) const { return image_[static_cast<std::size_t>(i)]; }
  Permutation inverse() const;
  std::uint64_t lehmer_code() const;
  std::vector<int> images() const;

  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::array<std::uint8_t, kMaxSize> image_{};
  std::uint8_t n_ = 0;
};

std::uint64_t factorial(int n);

/// A strict ranking of all n objects; position 0 is the most preferred.
class Preference {
 public:
  Preference() = default;

  /// Throws InvalidInput unless `ranking` is a permutation of all objects.
  static Preference from_ranking(std::span<const ObjectId> ranking);
  static Preference from_permutation(const Permutation& p);
  static Preference identity(int n);

  int size() const { return n_; }
  ObjectId at(int position) const { return ranking_[static_cast<std::size_t>(position)]; }
  ObjectId top() const { return ranking_[0]; }
  std::span<const ObjectId> ranking() const { return {ranking_.data(), n_}; }

  /// 0-based position; the object must belong to the ranking.
  int position_of(ObjectId x) const { return position_[static_cast<std::size_t>(index(x))]; }
  bool prefers(ObjectId x, ObjectId y) const { return position_of(x) < position_of(y); }
  bool weakly_prefers(ObjectId x, ObjectId y) const { return position_of(x) <= position_of(y); }

  std::uint64_t lehmer_code() const;

  friend auto operator<=>(const Preference&, const Preference&) = default;

 private:
  std::array<ObjectId, kMaxSize> ranking_{};
  std::array<std::uint8_t, kMaxSize> position_{};
  std::uint8_t n_ = 0;
};

Rank rank_of(const Preference& pref, ObjectId x);
ObjectId top_in(const Preference& pref, ObjectSet avail);

/// One preference per agent.
class Profile {
 public:
  Profile() = default;
  /// Throws InvalidInput if the preferences disagree on the number of objects
  /// or their count differs from it.
  explicit Profile(std::span<const Preference> prefs);

  int size() const { return n_; }
  const Preference& operator[](AgentId i) const { return prefs_[static_cast<std::size_t>(index(i))]; }
  const Preference& of(int i) const { return prefs_[static_cast<std::size_t>(i)]; }
  void set(AgentId i, const Preference& p);

  friend auto operator<=>(const Profile&, const Profile&) = default;

 private:
  std::array<Preference, kMaxSize> prefs_{};
  std::uint8_t n_ = 0;
};

/// Bijection from agents to objects.
class Matching {
 public:
  Matching() = default;

  /// Throws InvalidInput unless every object is assigned exactly once.
  static Matching from_assignment(std::span<const ObjectId> assignment);
  static Matching identity(int n);

  int size() const { return n_; }
  ObjectId operator[](AgentId i) const { return assignment_[static_cast<std::size_t>(index(i))]; }
  ObjectId of(int i) const { return assignment_[static_cast<std::size_t>(i)]; }
  std::span<const ObjectId> assignment() const { return {assignment_.data(), n_}; }
  AgentId holder(ObjectId x) const;

  friend auto operator<=>(const Matching&, const Matching&) = default;

 private:
  std::array<ObjectId, kMaxSize> assignment_{};
  std::uint8_t n_ = 0;
};

/// All n! matchings, ordered by the Lehmer code of their assignment vector.
std::vector<Matching> all_matchings(int n);

/// Applies an object map to every allotment: agent i receives map(mu_i).
Matching relabel(const Matching& mu, const Permutation& object_map);

/// A subset of a matching. Holds the partial assignment built up by the
/// trading-cycle algorithms.
class Submatching {
 public:
  Submatching() = default;
  explicit Submatching(int n);

  int size() const { return n_; }
  bool matched(AgentId i) const { return object_of_[static_cast<std::size_t>(index(i))] >= 0; }
  bool object_matched(ObjectId x) const { return matched_objects_.contains(x); }
  ObjectId object_of(AgentId i) const;
  int pair_count() const { return matched_objects_.size(); }
  bool complete() const { return pair_count() == n_; }

  AgentSet unmatched_agents() const;
  ObjectSet unmatched_objects() const;

  /// Throws InvalidInput if either side is already matched.
  void assign(AgentId i, ObjectId x);
  bool contains(const Submatching& smaller) const;
  Matching to_matching() const;

  /// Canonical key: pairs sorted by agent, rendered "1:a,3:c"; "" when empty.
  std::string key() const;

  friend auto operator<=>(const Submatching&, const Submatching&) = default;

 private:
  std::array<std::int8_t, kMaxSize> object_of_ = {-1, -1, -1, -1, -1, -1, -1, -1};
  ObjectSet matched_objects_{};
  std::uint8_t n_ = 0;
};

/// Applies tau^pi: agent k receives the preference of agent pi(k).
Profile permute_agents(const Profile& profile, const Permutation& pi);

/// Transposes objects x and y in every ranking and exchanges the resulting
/// preferences of agents i and j.
Profile swap_objects_in_profile(const Profile& profile, ObjectId x, ObjectId y, AgentId i, AgentId j);

/// Ranks pi^{-1}(x) exactly where the input ranked x.
Profile relabel_objects(const Profile& profile, const Permutation& pi);

}  // namespace balmatch
