#include <doctest.h>

#include <random>
#include <set>

#include "balmatch/codec.hpp"
#include "balmatch/mechanisms.hpp"
#include "balmatch/pareto.hpp"
#include "balmatch/profile_space.hpp"
#include "balmatch/sampling.hpp"
#include "oracles.hpp"

using namespace balmatch;

namespace {
Profile prof(const char* s) { return parse_profile(s); }
std::string fm(const Matching& m) { return format_matching(m); }
Endowment endow(const char* s) { return Endowment(parse_matching(s)); }
const char* kHat = "b>c>a; a>c>b; a>c>b";
const char* kTilde = "c>b>a; a>b>c; a>b>c";
}  // namespace

TEST_CASE("serial dictatorship examples") {
  const Profile same = prof("a>b>c; a>b>c; a>b>c");
  CHECK(fm(serial_dictatorship(std::vector{agent(0), agent(1), agent(2)}, same)) == "(a,b,c)");
  CHECK(fm(serial_dictatorship(std::vector{agent(2), agent(1), agent(0)}, same)) == "(c,b,a)");
  CHECK(fm(serial_dictatorship(std::vector{agent(0), agent(1), agent(2)}, prof(kHat))) == "(b,a,c)");
}

TEST_CASE("serial dictatorship matches the oracle for every order at n=3") {
  const ProfileSpace space(3);
  for (const Matching& order_m : all_matchings(3)) {
    std::vector<AgentId> order;
    std::vector<int> raw;
    for (ObjectId x : order_m.assignment()) {
      order.push_back(agent(index(x)));
      raw.push_back(index(x));
    }
    space.for_each([&](std::uint64_t, const Profile& p) {
      CHECK(oracle::from_matching(serial_dictatorship(order, p)) == oracle::serial_dictatorship(raw, oracle::from_profile(p)));
      return true;
    });
  }
}

TEST_CASE("ttc examples") {
  const Endowment abc = Endowment::identity(3);
  CHECK(fm(ttc(abc, prof("a>b>c; b>a>c; c>a>b"))) == "(a,b,c)");
  CHECK(fm(ttc(abc, prof(kHat))) == "(b,a,c)");
  CHECK(fm(ttc(abc, prof(kTilde))) == "(c,b,a)");
  CHECK(fm(ttc(endow("(c,a,b)"), prof("c>a>b; a>b>c; b>c>a"))) == "(c,a,b)");
}

TEST_CASE("ttc equals the simultaneous-clearing oracle on every profile and endowment at n=3") {
  const ProfileSpace space(3);
  for (const Matching& mu : all_matchings(3)) {
    const Endowment omega(mu);
    const auto raw = oracle::from_matching(mu);
    space.for_each([&](std::uint64_t, const Profile& p) {
      CHECK(oracle::from_matching(ttc(omega, p)) == oracle::ttc(raw, oracle::from_profile(p)));
      return true;
    });
  }
}

TEST_CASE("ttc equals the oracle on sampled profiles at n=4 and n=5") {
  std::mt19937_64 rng(11);
  for (int n : {4, 5}) {
    const Matching mu = parse_matching(n == 4 ? "(b,d,a,c)" : "(e,a,d,b,c)");
    for (int s = 0; s < 3000; ++s) {
      const Profile p = random_profile(n, rng);
      CHECK(oracle::from_matching(ttc(Endowment(mu), p)) == oracle::ttc(oracle::from_matching(mu), oracle::from_profile(p)));
    }
  }
}

TEST_CASE("ttc outcomes are efficient") {
  const Endowment omega = Endowment::identity(3);
  ProfileSpace(3).for_each([&](std::uint64_t, const Profile& p) {
    CHECK(oracle::efficient(oracle::from_matching(ttc(omega, p)), oracle::from_profile(p)));
    return true;
  });
}

TEST_CASE("tc3b worked examples") {
  const BrokerageProfile b = BrokerageProfile::identity();
  CHECK(fm(tc_three_brokers(b, prof("b>a>c; a>b>c; c>a>b"))) == "(b,a,c)");

  const Profile same = prof("a>b>c; a>b>c; a>b>c");
  std::set<std::string> m;
  for (const Matching& mu : broker_minimal_efficient_set(b, same)) m.insert(fm(mu));
  CHECK(m == std::set<std::string>{"(b,c,a)", "(c,a,b)"});
  CHECK(fm(tc_three_brokers(b, same)) == "(b,c,a)");

  const Profile case2 = prof("a>b>c; a>c>b; c>a>b");
  m.clear();
  for (const Matching& mu : broker_minimal_efficient_set(b, case2)) m.insert(fm(mu));
  CHECK(m == std::set<std::string>{"(a,c,b)", "(b,a,c)"});
  CHECK(fm(tc_three_brokers(b, case2)) == "(b,a,c)");
}

TEST_CASE("tc3b refuses other sizes") {
  CHECK_THROWS_AS(BrokerageProfile(Matching::identity(4)), UnsupportedSize);
  CHECK_THROWS_AS(tc_three_brokers(BrokerageProfile::identity(), prof("a>b; b>a")), UnsupportedSize);
}

TEST_CASE("tc3b matches the oracle rule on all brokerages and profiles") {
  const ProfileSpace space(3);
  for (const Matching& bm : all_matchings(3)) {
    const BrokerageProfile b(bm);
    const auto raw = oracle::from_matching(bm);
    space.for_each([&](std::uint64_t, const Profile& p) {
      const auto expected = oracle::tc3b(raw, oracle::from_profile(p));
      REQUIRE_MESSAGE(!expected.empty(), "oracle found no case at " << format_profile(p));
      CHECK(oracle::from_matching(tc_three_brokers(b, p)) == expected);
      return true;
    });
  }
}

TEST_CASE("tc3b outputs are efficient and M_b assigns each object to an agent at most once") {
  const ProfileSpace space(3);
  for (const Matching& bm : all_matchings(3)) {
    const BrokerageProfile b(bm);
    space.for_each([&](std::uint64_t, const Profile& p) {
      CHECK(oracle::efficient(oracle::from_matching(tc_three_brokers(b, p)), oracle::from_profile(p)));
      const auto m = broker_minimal_efficient_set(b, p);
      for (int i = 0; i < 3; ++i)
        for (int x = 0; x < 3; ++x) {
          int count = 0;
          for (const Matching& mu : m) count += mu.of(i) == object(x);
          CHECK(count <= 1);
        }
      return true;
    });
  }
}

TEST_CASE("owner_broker_tc examples") {
  const Profile same = prof("a>b>c; a>b>c; a>b>c");
  const Mechanism one = Mechanism::owner_broker(make_one_broker_table(agent(0), Endowment::identity(3)));
  CHECK(fm(one(same)) == "(b,a,c)");

  Rights two_owner(3);
  two_owner.set(object(0), {agent(0), RightKind::owner});
  two_owner.set(object(1), {agent(0), RightKind::owner});
  two_owner.set(object(2), {agent(1), RightKind::owner});
  const InheritanceTable two_owner_table = make_persistent_table(two_owner);
  CHECK(fm(owner_broker_tc(two_owner_table, prof("c>b>a; c>b>a; c>b>a"))) == "(b,c,a)");
}

TEST_CASE("owner_broker_tc with three brokers at the start delegates to tc3b") {
  Rights r(3);
  for (int i = 0; i < 3; ++i) r.set(object(i), {agent(i), RightKind::broker});
  std::map<Submatching, Rights> entries{{Submatching(3), r}};
  const InheritanceTable table = InheritanceTable::from_entries(3, entries);
  ProfileSpace(3).for_each([&](std::uint64_t, const Profile& p) {
    CHECK(owner_broker_tc(table, p) == tc_three_brokers(BrokerageProfile::identity(), p));
    return true;
  });
}

TEST_CASE("owner_broker_tc reports the missing submatching") {
  Rights r(3);
  for (int i = 0; i < 3; ++i) r.set(object(i), {agent(i), RightKind::owner});
  const InheritanceTable table = InheritanceTable::from_entries(3, {{Submatching(3), r}});
  // every agent tops her own object: the first cycle is agent 1 alone
  try {
    owner_broker_tc(table, prof("a>b>c; b>a>c; c>a>b"));
    FAIL("expected MalformedTable");
  } catch (const MalformedTable& e) {
    CHECK(std::string(e.what()).find("1:a") != std::string::npos);
  }
}

TEST_CASE("the zero-broker table reproduces ttc") {
  for (const Matching& mu : all_matchings(3)) {
    const InheritanceTable table = make_ttc_table(Endowment(mu));
    ProfileSpace(3).for_each([&](std::uint64_t, const Profile& p) {
      CHECK(owner_broker_tc(table, p) == ttc(Endowment(mu), p));
      return true;
    });
  }
}

TEST_CASE("psi example") {
  const Profile hat = prof(kHat), tilde = prof(kTilde);
  CHECK(psi_profile_hat() == hat);
  CHECK(psi_profile_tilde() == tilde);
  CHECK(fm(psi_example(hat)) == "(b,c,a)");
  CHECK(fm(psi_example(tilde)) == "(c,a,b)");
  Profile deviated = hat;
  deviated.set(agent(1), parse_preference("a>b>c"));
  CHECK(fm(psi_example(deviated)) == "(b,a,c)");
  CHECK(hat[agent(1)].prefers(psi_example(deviated)[agent(1)], psi_example(hat)[agent(1)]));
  CHECK_THROWS_AS(psi_example(prof("a>b; b>a")), UnsupportedSize);
  int differ = 0;
  ProfileSpace(3).for_each([&](std::uint64_t, const Profile& p) {
    differ += psi_example(p) != ttc(Endowment::identity(3), p);
    return true;
  });
  CHECK(differ == 2);
}

TEST_CASE("mechanism objects dispatch and validate sizes") {
  const Mechanism c = Mechanism::constant(parse_matching("(b,a,c)"));
  CHECK(c.name() == "constant");
  CHECK(fm(c(prof("a>b>c; a>b>c; a>b>c"))) == "(b,a,c)");
  CHECK_THROWS_AS(c(prof("a>b; b>a")), InvalidInput);
  CHECK_THROWS_AS(Mechanism::serial_dictatorship({agent(0), agent(0)}), InvalidInput);
  CHECK(Mechanism::psi_example().size() == 3);
  CHECK(Mechanism::tc3b(BrokerageProfile::identity()).name() == "tc3b");
}

TEST_CASE("random cycle orders give the canonical ttc outcome at n=4") {
  std::mt19937_64 rng(5);
  const Endowment omega(parse_matching("(d,c,a,b)"));
  for (int s = 0; s < 2000; ++s) {
    const Profile p = random_profile(4, rng);
    CHECK(ttc_random_cycle_order(omega, p, rng) == ttc(omega, p));
  }
}
