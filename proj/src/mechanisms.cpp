#include "balmatch/mechanisms.hpp"

#include <algorithm>

#include "balmatch/codec.hpp"
#include "balmatch/pareto.hpp"

namespace balmatch {

namespace {

constexpr std::int8_t kNone = -1;

void require_same_size(int expected, const Profile& profile) {
  if (profile.size() != expected)
    throw InvalidInput("profile has " + std::to_string(profile.size()) + " agents, mechanism expects " +
                       std::to_string(expected));
}

// Pointer graph of one trading step: agent -> object -> controlling agent.
struct PointerGraph {
  std::array<std::int8_t, kMaxSize> points_to{};   // agent -> object, kNone if no pointer
  std::array<std::int8_t, kMaxSize> controller{};  // object -> agent

  int next_agent(int a) const {
    const auto x = points_to[static_cast<std::size_t>(a)];
    return x == kNone ? kNone : controller[static_cast<std::size_t>(x)];
  }
};

// Follows pointers from each remaining agent in index order and returns the
// members of the first cycle met; empty if every walk dead-ends.
std::vector<int> first_cycle(const PointerGraph& g, AgentSet agents) {
  std::array<int, kMaxSize> walk{};
  walk.fill(-1);
  int walk_id = 0;
  for (AgentId start : agents.members()) {
    ++walk_id;
    int a = index(start);
    while (a != kNone && walk[static_cast<std::size_t>(a)] == -1) {
      walk[static_cast<std::size_t>(a)] = walk_id;
      a = g.next_agent(a);
    }
    if (a == kNone || walk[static_cast<std::size_t>(a)] != walk_id) continue;
    std::vector<int> cycle{a};
    for (int b = g.next_agent(a); b != a; b = g.next_agent(b)) cycle.push_back(b);
    return cycle;
  }
  return {};
}

// All cycles of a pointer graph in which every agent has a pointer.
std::vector<std::vector<int>> all_cycles(const PointerGraph& g, AgentSet agents) {
  std::vector<std::vector<int>> cycles;
  std::array<int, kMaxSize> walk{};
  walk.fill(-1);
  int walk_id = 0;
  for (AgentId start : agents.members()) {
    ++walk_id;
    int a = index(start);
    while (walk[static_cast<std::size_t>(a)] == -1) {
      walk[static_cast<std::size_t>(a)] = walk_id;
      a = g.next_agent(a);
    }
    if (walk[static_cast<std::size_t>(a)] != walk_id) continue;
    std::vector<int> cycle{a};
    for (int b = g.next_agent(a); b != a; b = g.next_agent(b)) cycle.push_back(b);
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

template <class PickCycle>
Matching run_ttc(const Endowment& omega, const Profile& profile, PickCycle&& pick) {
  const int n = omega.size();
  require_same_size(n, profile);
  Submatching nu(n);
  PointerGraph g;
  for (int i = 0; i < n; ++i) g.controller[static_cast<std::size_t>(index(omega.of(agent(i))))] = static_cast<std::int8_t>(i);
  while (!nu.complete()) {
    const AgentSet agents = nu.unmatched_agents();
    const ObjectSet avail = nu.unmatched_objects();
    for (AgentId i : agents.members())
      g.points_to[static_cast<std::size_t>(index(i))] = static_cast<std::int8_t>(index(top_in(profile[i], avail)));
    const std::vector<int> cycle = pick(g, agents);
    for (int a : cycle) nu.assign(agent(a), object(g.points_to[static_cast<std::size_t>(a)]));
  }
  return nu.to_matching();
}

}  // namespace

Matching serial_dictatorship(std::span<const AgentId> order, const Profile& profile) {
  const int n = profile.size();
  if (static_cast<int>(order.size()) != n) throw InvalidInput("dictator order length differs from profile size");
  Submatching nu(n);
  for (AgentId i : order) {
    if (index(i) >= n || nu.matched(i)) throw InvalidInput("dictator order is not a permutation of the agents");
    nu.assign(i, top_in(profile[i], nu.unmatched_objects()));
  }
  return nu.to_matching();
}

Matching ttc(const Endowment& omega, const Profile& profile) {
  return run_ttc(omega, profile, [](const PointerGraph& g, AgentSet agents) { return first_cycle(g, agents); });
}

Matching ttc_random_cycle_order(const Endowment& omega, const Profile& profile, std::mt19937_64& rng) {
  return run_ttc(omega, profile, [&rng](const PointerGraph& g, AgentSet agents) {
    auto cycles = all_cycles(g, agents);
    const auto k = static_cast<std::size_t>(rng() % cycles.size());
    return cycles[k];
  });
}

std::vector<Matching> broker_minimal_efficient_set(const BrokerageProfile& b, const Profile& profile) {
  require_same_size(3, profile);
  auto hits = [&b](const Matching& mu) {
    int h = 0;
    for (int i = 0; i < 3; ++i) h += mu.of(i) == b.of(agent(i)) ? 1 : 0;
    return h;
  };
  const std::vector<Matching> efficient = efficient_matchings(profile);
  int fewest = 4;
  for (const auto& mu : efficient) fewest = std::min(fewest, hits(mu));
  std::vector<Matching> out;
  for (const auto& mu : efficient)
    if (hits(mu) == fewest) out.push_back(mu);
  return out;
}

Matching tc_three_brokers(const BrokerageProfile& b, const Profile& profile) {
  if (profile.size() != 3)
    throw UnsupportedSize("trading cycles with three brokers needs n=3, got n=" + std::to_string(profile.size()));
  const std::vector<Matching> candidates = broker_minimal_efficient_set(b, profile);
  if (candidates.size() == 1) return candidates.front();

  for (int i = 0; i < 3; ++i) {
    const ObjectId brokered = b.of(agent(i));
    int demand = 0;
    for (int h = 0; h < 3; ++h) demand += profile.of(h).top() == brokered ? 1 : 0;
    if (demand < 2) continue;

    const Preference& own = profile.of(i);
    const bool self_demand = own.top() == brokered;
    const int others = demand - (self_demand ? 1 : 0);
    auto by_rank_for_i = [&own, i](const Matching& x, const Matching& y) {
      return own.position_of(x.of(i)) < own.position_of(y.of(i));
    };
    if (self_demand && others == 1)  // agents i and j demand b_i, k does not: worst for i
      return *std::max_element(candidates.begin(), candidates.end(), by_rank_for_i);
    if (others == 2)  // both other agents demand b_i: best for i
      return *std::min_element(candidates.begin(), candidates.end(), by_rank_for_i);
  }
  throw std::logic_error("non-singleton broker-minimal set at " + format_profile(profile) +
                         " without a brokered object demanded by two agents");
}

Matching owner_broker_tc(const InheritanceTable& table, const Profile& profile) {
  const int n = table.size();
  require_same_size(n, profile);
  Submatching nu(n);
  PointerGraph g;
  for (;;) {
    const AgentSet agents = nu.unmatched_agents();
    if (agents.empty()) break;
    const ObjectSet avail = nu.unmatched_objects();
    if (agents.size() == 1) {
      nu.assign(agents.first(), avail.first());
      break;
    }
    const auto rights = table.rights_at(nu);
    if (!rights) throw MalformedTable("inheritance table has no entry for submatching {" + nu.key() + "}");

    if (nu.pair_count() == 0 && n == 3 && rights->brokers().size() == 3) {
      std::array<ObjectId, 3> brokered{};
      for (int x = 0; x < 3; ++x)
        brokered[static_cast<std::size_t>(index(rights->at(object(x))->agent))] = object(x);
      return tc_three_brokers(BrokerageProfile(Matching::from_assignment(brokered)), profile);
    }

    for (ObjectId x : avail.members()) {
      const auto& r = rights->at(x);
      if (!r || !agents.contains(r->agent))
        throw MalformedTable("object " + object_name(x) + " has no unmatched controller at submatching {" +
                             nu.key() + "}");
      g.controller[static_cast<std::size_t>(index(x))] = static_cast<std::int8_t>(index(r->agent));
    }
    for (AgentId i : agents.members()) {
      ObjectSet pointable = avail;
      for (ObjectId x : rights->brokered_by(i).members()) pointable.erase(x);
      g.points_to[static_cast<std::size_t>(index(i))] =
          pointable.empty() ? kNone : static_cast<std::int8_t>(index(top_in(profile[i], pointable)));
    }
    const std::vector<int> cycle = first_cycle(g, agents);
    if (cycle.empty()) throw MalformedTable("no trading cycle at submatching {" + nu.key() + "}");
    for (int a : cycle) nu.assign(agent(a), object(g.points_to[static_cast<std::size_t>(a)]));
  }
  return nu.to_matching();
}

Profile psi_profile_hat() { return parse_profile("b>c>a; a>c>b; a>c>b"); }
Profile psi_profile_tilde() { return parse_profile("c>b>a; a>b>c; a>b>c"); }

Matching psi_example(const Profile& profile) {
  if (profile.size() != 3) throw UnsupportedSize("psi is defined for n=3 only");
  static const Profile hat = psi_profile_hat();
  static const Profile tilde = psi_profile_tilde();
  if (profile == hat) return parse_matching("(b,c,a)");
  if (profile == tilde) return parse_matching("(c,a,b)");
  return ttc(Endowment::identity(3), profile);
}

BrokerageProfile::BrokerageProfile(const Matching& brokers) : brokers_(brokers) {
  if (brokers.size() != 3)
    throw UnsupportedSize("brokerage profiles are defined for n=3, got n=" + std::to_string(brokers.size()));
}

Mechanism Mechanism::serial_dictatorship(std::vector<AgentId> order) {
  const int n = static_cast<int>(order.size());
  require_size(n);
  AgentSet seen;
  for (AgentId i : order) {
    if (index(i) >= n || seen.contains(i)) throw InvalidInput("dictator order is not a permutation of the agents");
    seen.insert(i);
  }
  return Mechanism(SerialDictatorship{std::move(order)}, n);
}

Mechanism Mechanism::ttc(const Endowment& omega) { return Mechanism(Ttc{omega}, omega.size()); }

Mechanism Mechanism::tc3b(const BrokerageProfile& b) { return Mechanism(Tc3b{b}, 3); }

Mechanism Mechanism::owner_broker(InheritanceTable table) {
  const int n = table.size();
  return Mechanism(OwnerBroker{std::make_shared<const InheritanceTable>(std::move(table))}, n);
}

Mechanism Mechanism::constant(const Matching& mu) { return Mechanism(Constant{mu}, mu.size()); }

Mechanism Mechanism::psi_example() { return Mechanism(PsiExample{}, 3); }

std::string Mechanism::name() const {
  struct Namer {
    std::string operator()(const SerialDictatorship&) const { return "serial_dictatorship"; }
    std::string operator()(const Ttc&) const { return "ttc"; }
    std::string operator()(const Tc3b&) const { return "tc3b"; }
    std::string operator()(const OwnerBroker&) const { return "owner_broker"; }
    std::string operator()(const Constant&) const { return "constant"; }
    std::string operator()(const PsiExample&) const { return "psi_example"; }
  };
  return std::visit(Namer{}, kind_);
}

Matching Mechanism::operator()(const Profile& profile) const {
  require_same_size(n_, profile);
  struct Eval {
    const Profile& profile;
    Matching operator()(const SerialDictatorship& m) const { return balmatch::serial_dictatorship(m.order, profile); }
    Matching operator()(const Ttc& m) const { return balmatch::ttc(m.endowment, profile); }
    Matching operator()(const Tc3b& m) const { return tc_three_brokers(m.brokerage, profile); }
    Matching operator()(const OwnerBroker& m) const { return owner_broker_tc(*m.table, profile); }
    Matching operator()(const Constant& m) const { return m.matching; }
    Matching operator()(const PsiExample&) const { return balmatch::psi_example(profile); }
  };
  return std::visit(Eval{profile}, kind_);
}

}  // namespace balmatch
