#include <doctest.h>

#include <algorithm>

#include "balmatch/codec.hpp"
#include "balmatch/inheritance.hpp"
#include "balmatch/mechanisms.hpp"
#include "balmatch/profile_space.hpp"

using namespace balmatch;

namespace {

Rights owners(int n, std::initializer_list<std::pair<const char*, int>> spec) {
  Rights r(n);
  for (auto [x, i] : spec) r.set(parse_object(x), {agent(i - 1), RightKind::owner});
  return r;
}

bool has_kind(const ValidationReport& v, TableViolation::Kind k) {
  return std::any_of(v.violations.begin(), v.violations.end(), [&](const TableViolation& t) { return t.kind == k; });
}

}  // namespace

TEST_CASE("generated tables validate") {
  for (int n : {2, 3, 4}) {
    const auto ttc_report = validate_inheritance_table(make_ttc_table(Endowment::identity(n)));
    CHECK_MESSAGE(ttc_report.ok(), "n=" << n);
    const auto broker_report = validate_inheritance_table(make_one_broker_table(agent(0), Endowment::identity(n)));
    CHECK_MESSAGE(broker_report.ok(), "n=" << n);
  }
}

TEST_CASE("the zero-broker table has no broker anywhere") {
  const InheritanceTable t = make_ttc_table(Endowment(parse_matching("(c,a,d,b)")));
  for (const Submatching& nu : reachable_submatchings(t)) CHECK(t.rights_at(nu)->brokers().empty());
}

TEST_CASE("the one-broker table has exactly one broker at the start") {
  const InheritanceTable t = make_one_broker_table(agent(1), Endowment::identity(4));
  CHECK(t.initial().brokers().size() == 1);
  CHECK(t.initial().brokers().contains(agent(1)));
  CHECK(t.initial().at(parse_object("b"))->kind == RightKind::broker);
}

TEST_CASE("orphaned objects pass to the lowest-indexed unmatched agent as owner") {
  const InheritanceTable t = make_ttc_table(Endowment::identity(3));
  const Rights r = *t.rights_at(parse_submatching(3, "1:b"));
  CHECK(r.at(parse_object("a"))->agent == agent(1));
  CHECK(r.at(parse_object("a"))->kind == RightKind::owner);
  CHECK(r.at(parse_object("c"))->agent == agent(2));
}

TEST_CASE("two brokers at the start of a four-agent table violate the brokerage limit") {
  Rights r = owners(4, {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}});
  r.set(parse_object("a"), {agent(0), RightKind::broker});
  r.set(parse_object("b"), {agent(1), RightKind::broker});
  const auto report = validate_inheritance_table(make_persistent_table(r));
  CHECK(has_kind(report, TableViolation::Kind::brokerage_limit));
}

TEST_CASE("three brokers are allowed only at n=3") {
  Rights r(3);
  for (int i = 0; i < 3; ++i) r.set(object(i), {agent(i), RightKind::broker});
  const auto report = validate_inheritance_table(InheritanceTable::from_entries(3, {{Submatching(3), r}}));
  CHECK(report.ok());
  CHECK(reachable_submatchings(InheritanceTable::from_entries(3, {{Submatching(3), r}})).size() == 1);
}

TEST_CASE("ownership loss is reported as a persistence violation naming the place") {
  auto entries = materialize(make_ttc_table(Endowment::identity(3))).entries();
  // agent 3 owns c at the start but loses it to agent 2 after 1 takes a
  const Submatching nu = parse_submatching(3, "1:a");
  entries[nu].set(parse_object("c"), {agent(1), RightKind::owner});
  const auto report = validate_inheritance_table(InheritanceTable::from_entries(3, entries));
  REQUIRE(has_kind(report, TableViolation::Kind::persistence));
  const auto it = std::find_if(report.violations.begin(), report.violations.end(),
                               [](const TableViolation& v) { return v.kind == TableViolation::Kind::persistence; });
  CHECK(it->at == nu);
  CHECK(it->object == parse_object("c"));
  CHECK(it->agent == agent(2));
}

TEST_CASE("missing entries and rights are reported") {
  const Rights start = owners(3, {{"a", 1}, {"b", 2}, {"c", 3}});
  auto missing_entry = validate_inheritance_table(InheritanceTable::from_entries(3, {{Submatching(3), start}}));
  CHECK(has_kind(missing_entry, TableViolation::Kind::missing_entry));

  auto entries = materialize(make_ttc_table(Endowment::identity(3))).entries();
  Rights partial(3);
  partial.set(parse_object("a"), {agent(0), RightKind::owner});
  partial.set(parse_object("b"), {agent(1), RightKind::owner});
  entries[Submatching(3)] = partial;
  CHECK(has_kind(validate_inheritance_table(InheritanceTable::from_entries(3, entries)), TableViolation::Kind::missing_right));
}

TEST_CASE("a matched controller is reported") {
  auto entries = materialize(make_ttc_table(Endowment::identity(3))).entries();
  const Submatching nu = parse_submatching(3, "2:b");
  entries[nu].set(parse_object("a"), {agent(1), RightKind::owner});
  CHECK(has_kind(validate_inheritance_table(InheritanceTable::from_entries(3, entries)),
                 TableViolation::Kind::matched_controller));
}

TEST_CASE("a broker of every remaining object is reported as a deadlock") {
  auto entries = materialize(make_ttc_table(Endowment::identity(3))).entries();
  const Submatching nu = parse_submatching(3, "1:a");
  entries[nu].set(parse_object("b"), {agent(1), RightKind::broker});
  entries[nu].set(parse_object("c"), {agent(1), RightKind::broker});
  CHECK(has_kind(validate_inheritance_table(InheritanceTable::from_entries(3, entries)), TableViolation::Kind::deadlock));
}

TEST_CASE("materialized tables drive the same outcomes as generated ones") {
  const InheritanceTable gen = make_one_broker_table(agent(2), Endowment(parse_matching("(b,c,a)")));
  const InheritanceTable mat = materialize(gen);
  CHECK_FALSE(mat.generated());
  CHECK(mat.entries().size() == reachable_submatchings(gen).size());
  ProfileSpace(3).for_each([&](std::uint64_t, const Profile& p) {
    CHECK(owner_broker_tc(gen, p) == owner_broker_tc(mat, p));
    return true;
  });
}

TEST_CASE("reachable submatchings keep at least two unmatched agents") {
  for (const Submatching& nu : reachable_submatchings(make_ttc_table(Endowment::identity(4))))
    CHECK(nu.unmatched_agents().size() >= 2);
  // only self-cycles leave two agents: the empty submatching plus {i:omega_i}
  CHECK(reachable_submatchings(make_ttc_table(Endowment::identity(3))).size() == 1 + 3);
}
