#include <doctest.h>

#include <set>

#include "balmatch/codec.hpp"
#include "balmatch/core.hpp"
#include "balmatch/profile_space.hpp"
#include "oracles.hpp"

using namespace balmatch;

namespace {
Preference pref(const char* s) { return parse_preference(s); }
ObjectId obj(const char* s) { return parse_object(s); }
}  // namespace

TEST_CASE("rank_of reports 1 for the top choice") {
  CHECK(rank_of(pref("a>b>c"), obj("a")).value == 1);
  CHECK(rank_of(pref("a>b>c"), obj("c")).value == 3);
  const Rank mid = rank_of(pref("a>b>c"), obj("b"));
  CHECK(mid.value == 2);
  CHECK(mid.paper_index(3) == 2);
  CHECK(Rank{1}.paper_index(3) == 3);
}

TEST_CASE("top_in skips unavailable objects") {
  ObjectSet bc;
  bc.insert(obj("b"));
  bc.insert(obj("c"));
  CHECK(top_in(pref("a>b>c"), bc) == obj("b"));
  ObjectSet c;
  c.insert(obj("c"));
  CHECK(top_in(pref("a>b>c"), c) == obj("c"));
  ObjectSet ab;
  ab.insert(obj("a"));
  ab.insert(obj("b"));
  CHECK(top_in(pref("c>a>b"), ab) == obj("a"));
  CHECK_THROWS_AS(top_in(pref("a>b>c"), ObjectSet{}), InvalidInput);
}

TEST_CASE("rank_of and top_in agree on the full object set") {
  const ProfileSpace space(3);
  for (const Preference& p : space.preferences())
    CHECK(rank_of(p, top_in(p, ObjectSet::full(3))).value == 1);
}

TEST_CASE("invalid rankings and matchings are rejected") {
  CHECK_THROWS(parse_preference("a>a>c"));
  CHECK_THROWS(parse_preference("a>b>d"));
  CHECK_THROWS(parse_matching("(a,a,c)"));
  CHECK_THROWS(parse_profile("a>b>c; a>b"));
  CHECK_THROWS_AS(require_size(0), UnsupportedSize);
  CHECK_THROWS_AS(require_size(kMaxSize + 1), UnsupportedSize);
}

TEST_CASE("text codec round-trips") {
  const std::string p = "b>c>a; a>c>b; a>c>b";
  CHECK(format_profile(parse_profile(p)) == p);
  CHECK(format_matching(parse_matching("(b,a,c)")) == "(b,a,c)");
  CHECK(parse_matching("b,a,c") == parse_matching("(b,a,c)"));
  CHECK(parse_submatching(3, "").pair_count() == 0);
  const Submatching nu = parse_submatching(3, "3:c,1:a");
  CHECK(nu.key() == "1:a,3:c");
  CHECK(nu.object_of(agent(2)) == obj("c"));
  CHECK_THROWS(parse_submatching(3, "1:a,2:a"));
}

TEST_CASE("profile enumeration sizes") {
  CHECK(ProfileSpace(1).size() == 1);
  CHECK(ProfileSpace(2).size() == 4);
  CHECK(ProfileSpace(3).size() == 216);
  CHECK(ProfileSpace(4).size() == 331776);
}

TEST_CASE("enumeration order matches lexicographic agent-major order, without duplicates") {
  for (int n = 1; n <= 3; ++n) {
    const auto expected = oracle::all_profiles(n);
    const ProfileSpace space(n);
    REQUIRE(space.size() == expected.size());
    std::set<Profile> seen;
    space.for_each([&](std::uint64_t r, const Profile& p) {
      CHECK(oracle::from_profile(p) == expected[r]);
      CHECK(space.index_of(p) == r);
      CHECK(space.at(r) == p);
      seen.insert(p);
      return true;
    });
    CHECK(seen.size() == space.size());
  }
}

TEST_CASE("chunked enumeration equals unchunked enumeration") {
  const ProfileSpace space(3);
  std::vector<Profile> whole;
  space.for_each([&](std::uint64_t, const Profile& p) {
    whole.push_back(p);
    return true;
  });
  for (int parts : {1, 2, 5, 8, 216, 300}) {
    std::vector<Profile> chunked;
    for (const IndexRange& r : split_range(space.size(), parts))
      space.for_each(r.begin, r.end, [&](std::uint64_t, const Profile& p) {
        chunked.push_back(p);
        return true;
      });
    CHECK(chunked == whole);
  }
}

TEST_CASE("exhaustion limit follows the environment") {
  CHECK(exhaustion_limit() == kDefaultExhaustionLimit);
  CHECK_THROWS_AS(enumerate_profiles(5), ExhaustionLimitExceeded);
  try {
    enumerate_profiles(5);
  } catch (const ExhaustionLimitExceeded& e) {
    CHECK(std::string(e.what()).find("24883200000") != std::string::npos);
  }
  setenv("BALMATCH_EXHAUSTION_LIMIT", "2", 1);
  CHECK(exhaustion_limit() == 2);
  CHECK_THROWS_AS(enumerate_profiles(3), ExhaustionLimitExceeded);
  setenv("BALMATCH_EXHAUSTION_LIMIT", "junk", 1);
  CHECK(exhaustion_limit() == kDefaultExhaustionLimit);
  unsetenv("BALMATCH_EXHAUSTION_LIMIT");
}

TEST_CASE("Lehmer codes index rankings in lexicographic order") {
  const auto rankings = oracle::all_rankings(4);
  for (std::size_t k = 0; k < rankings.size(); ++k) {
    const Permutation p = Permutation::from_lehmer(4, k);
    CHECK(p.images() == rankings[k]);
    CHECK(p.lehmer_code() == k);
    CHECK(Preference::from_permutation(p).lehmer_code() == k);
  }
}

TEST_CASE("permute_agents gives agent k the ranking of agent pi(k)") {
  const Profile r = parse_profile("a>b>c; b>c>a; c>a>b");
  CHECK(permute_agents(r, Permutation::identity(3)) == r);
  const Profile two = parse_profile("a>b; b>a");
  CHECK(permute_agents(two, Permutation::from_images(std::vector<int>{1, 0})) == parse_profile("b>a; a>b"));
  const Permutation pi = Permutation::from_images(std::vector<int>{2, 0, 1});
  CHECK(permute_agents(r, pi) == parse_profile("c>a>b; a>b>c; b>c>a"));
  CHECK(permute_agents(permute_agents(r, pi), pi.inverse()) == r);
  CHECK_THROWS(Permutation::from_images(std::vector<int>{0, 0, 1}));
}

TEST_CASE("swap_objects_in_profile worked example") {
  const Profile r = parse_profile("a>b>c; c>a>b; b>a>c");
  const Profile t = swap_objects_in_profile(r, obj("a"), obj("b"), agent(0), agent(1));
  CHECK(format_profile(t) == "c>b>a; b>a>c; a>b>c");
  CHECK(swap_objects_in_profile(t, obj("a"), obj("b"), agent(0), agent(1)) == r);
  CHECK_THROWS_AS(swap_objects_in_profile(r, obj("a"), obj("a"), agent(0), agent(1)), InvalidInput);
  CHECK_THROWS_AS(swap_objects_in_profile(r, obj("a"), obj("b"), agent(1), agent(1)), InvalidInput);
}

TEST_CASE("swap leaves third parties unchanged apart from the two objects") {
  const Profile r = parse_profile("a>b>c; a>b>c; c>b>a");
  const Profile t = swap_objects_in_profile(r, obj("b"), obj("c"), agent(0), agent(1));
  CHECK(format_preference(t.of(2)) == "b>c>a");
}

TEST_CASE("relabel_objects ranks pi^-1(x) where x was ranked") {
  const Profile r = parse_profile("a>b>c; c>b>a; b>a>c");
  CHECK(relabel_objects(r, Permutation::identity(3)) == r);
  const Permutation swap_ab = Permutation::from_images(std::vector<int>{1, 0, 2});
  CHECK(format_preference(relabel_objects(r, swap_ab).of(0)) == "b>a>c");
  CHECK(format_preference(relabel_objects(r, swap_ab).of(1)) == "c>a>b");
  const Permutation cyc = Permutation::from_images(std::vector<int>{1, 2, 0});
  const Profile t = relabel_objects(r, cyc);
  for (int i = 0; i < 3; ++i)
    for (int x = 0; x < 3; ++x)
      CHECK(rank_of(t.of(i), object(cyc.inverse()(x))) == rank_of(r.of(i), object(x)));
}

TEST_CASE("permute_agents, relabel_objects and swaps are bijections on the n=3 profile space") {
  const ProfileSpace space(3);
  const auto perms = {Permutation::from_images(std::vector<int>{1, 2, 0}),
                      Permutation::from_images(std::vector<int>{1, 0, 2})};
  for (const Permutation& pi : perms) {
    std::set<Profile> agents_img, objects_img, swap_img;
    space.for_each([&](std::uint64_t, const Profile& p) {
      agents_img.insert(permute_agents(p, pi));
      objects_img.insert(relabel_objects(p, pi));
      swap_img.insert(swap_objects_in_profile(p, object(0), object(2), agent(0), agent(2)));
      return true;
    });
    CHECK(agents_img.size() == 216);
    CHECK(objects_img.size() == 216);
    CHECK(swap_img.size() == 216);
  }
}

TEST_CASE("matchings enumerate in Lehmer order and relabel consistently") {
  const auto all = all_matchings(3);
  REQUIRE(all.size() == 6);
  CHECK(format_matching(all.front()) == "(a,b,c)");
  CHECK(format_matching(all.back()) == "(c,b,a)");
  const Matching mu = parse_matching("(b,c,a)");
  CHECK(mu.holder(obj("a")) == agent(2));
  const Permutation cyc = Permutation::from_images(std::vector<int>{1, 2, 0});
  CHECK(format_matching(relabel(mu, cyc)) == "(c,a,b)");
}

TEST_CASE("submatching views") {
  Submatching nu(4);
  nu.assign(agent(0), obj("c"));
  nu.assign(agent(3), obj("a"));
  CHECK(nu.pair_count() == 2);
  CHECK(nu.unmatched_agents().members() == std::vector<AgentId>{agent(1), agent(2)});
  CHECK(nu.unmatched_objects().members() == std::vector<ObjectId>{obj("b"), obj("d")});
  Submatching small(4);
  small.assign(agent(3), obj("a"));
  CHECK(nu.contains(small));
  CHECK_FALSE(small.contains(nu));
  CHECK_THROWS(nu.assign(agent(1), obj("c")));
}
