#include "balmatch/inheritance.hpp"

#include <deque>
#include <set>

#include "balmatch/codec.hpp"

namespace balmatch {

ObjectSet Rights::brokered_by(AgentId i) const {
  ObjectSet s;
  for (int x = 0; x < n_; ++x) {
    const auto& r = rights_[static_cast<std::size_t>(x)];
    if (r && r->agent == i && r->kind == RightKind::broker) s.insert(object(x));
  }
  return s;
}

AgentSet Rights::brokers() const {
  AgentSet s;
  for (int x = 0; x < n_; ++x) {
    const auto& r = rights_[static_cast<std::size_t>(x)];
    if (r && r->kind == RightKind::broker) s.insert(r->agent);
  }
  return s;
}

InheritanceTable InheritanceTable::from_entries(int n, std::map<Submatching, Rights> entries) {
  require_size(n);
  InheritanceTable t;
  t.n_ = n;
  for (const auto& [nu, rights] : entries)
    if (nu.size() != n || rights.size() != n)
      throw InvalidInput("table entry '" + nu.key() + "' does not match instance size " + std::to_string(n));
  t.entries_ = std::move(entries);
  if (auto it = t.entries_.find(Submatching(n)); it != t.entries_.end()) t.initial_ = it->second;
  return t;
}

InheritanceTable InheritanceTable::from_rule(int n, Rights initial, Rule rule) {
  require_size(n);
  if (initial.size() != n) throw InvalidInput("initial rights do not match instance size");
  InheritanceTable t;
  t.n_ = n;
  t.initial_ = initial;
  t.rule_ = std::move(rule);
  return t;
}

std::optional<Rights> InheritanceTable::rights_at(const Submatching& nu) const {
  if (rule_) return rule_(nu);
  if (auto it = entries_.find(nu); it != entries_.end()) return it->second;
  return std::nullopt;
}

Rights InheritanceTable::initial() const {
  if (auto r = rights_at(Submatching(n_))) return *r;
  throw MalformedTable("table has no entry for the empty submatching");
}

InheritanceTable make_persistent_table(const Rights& initial) {
  const int n = initial.size();
  for (int x = 0; x < n; ++x)
    if (!initial.at(object(x)))
      throw InvalidInput("initial rights leave object " + object_name(object(x)) + " uncontrolled");
  auto rule = [initial, n](const Submatching& nu) {
    Rights r(n);
    const AgentSet free_agents = nu.unmatched_agents();
    if (free_agents.empty()) return r;
    for (ObjectId x : nu.unmatched_objects().members()) {
      const ControlRight c = *initial.at(x);
      if (free_agents.contains(c.agent))
        r.set(x, c);
      else
        r.set(x, ControlRight{free_agents.first(), RightKind::owner});
    }
    return r;
  };
  return InheritanceTable::from_rule(n, initial, rule);
}

InheritanceTable make_ttc_table(const Endowment& omega) {
  Rights initial(omega.size());
  for (int i = 0; i < omega.size(); ++i) initial.set(omega.of(agent(i)), {agent(i), RightKind::owner});
  return make_persistent_table(initial);
}

InheritanceTable make_one_broker_table(AgentId broker, const Endowment& omega) {
  if (index(broker) >= omega.size()) throw InvalidInput("broker outside the instance");
  Rights initial(omega.size());
  for (int i = 0; i < omega.size(); ++i)
    initial.set(omega.of(agent(i)), {agent(i), agent(i) == broker ? RightKind::broker : RightKind::owner});
  return make_persistent_table(initial);
}

namespace {

bool three_broker_start(const Rights& rights) { return rights.size() == 3 && rights.brokers().size() == 3; }

// All submatchings obtained from nu by clearing one trading cycle that the
// rights allow. Controllers that are matched are skipped (reported by the
// validator separately).
void successors(const Submatching& nu, const Rights& rights, std::vector<Submatching>& out) {
  const AgentSet free_agents = nu.unmatched_agents();
  const ObjectSet free_objects = nu.unmatched_objects();
  std::vector<std::pair<AgentId, ObjectId>> path;

  auto dfs = [&](auto&& self, AgentId start, AgentId at, AgentSet on_path) -> void {
    const ObjectSet pointable = [&] {
      ObjectSet s = free_objects;
      for (ObjectId x : rights.brokered_by(at).members()) s.erase(x);
      return s;
    }();
    for (ObjectId x : pointable.members()) {
      const auto& r = rights.at(x);
      if (!r || !free_agents.contains(r->agent)) continue;
      const AgentId next = r->agent;
      path.emplace_back(at, x);
      if (next == start) {
        Submatching grown = nu;
        for (auto [i, y] : path) grown.assign(i, y);
        out.push_back(grown);
      } else if (index(next) > index(start) && !on_path.contains(next)) {
        AgentSet extended = on_path;
        extended.insert(next);
        self(self, start, next, extended);
      }
      path.pop_back();
    }
  };

  for (AgentId s : free_agents.members()) {
    AgentSet on_path;
    on_path.insert(s);
    dfs(dfs, s, s, on_path);
  }
}

}  // namespace

std::vector<Submatching> reachable_submatchings(const InheritanceTable& table) {
  const int n = table.size();
  std::set<Submatching> seen;
  std::deque<Submatching> queue;
  std::vector<Submatching> order;
  const Submatching empty(n);
  if (n < 2) return {};
  seen.insert(empty);
  queue.push_back(empty);
  std::vector<Submatching> next;
  while (!queue.empty()) {
    const Submatching nu = queue.front();
    queue.pop_front();
    order.push_back(nu);
    const auto rights = table.rights_at(nu);
    if (!rights) continue;
    if (nu.pair_count() == 0 && three_broker_start(*rights)) continue;
    next.clear();
    successors(nu, *rights, next);
    for (const auto& grown : next) {
      if (grown.unmatched_agents().size() < 2) continue;
      if (seen.insert(grown).second) queue.push_back(grown);
    }
  }
  return order;
}

InheritanceTable materialize(const InheritanceTable& table) {
  std::map<Submatching, Rights> entries;
  for (const auto& nu : reachable_submatchings(table))
    if (auto r = table.rights_at(nu)) entries.emplace(nu, *r);
  return InheritanceTable::from_entries(table.size(), std::move(entries));
}

std::string to_string(TableViolation::Kind kind) {
  switch (kind) {
    case TableViolation::Kind::missing_entry: return "missing_entry";
    case TableViolation::Kind::missing_right: return "missing_right";
    case TableViolation::Kind::matched_controller: return "matched_controller";
    case TableViolation::Kind::brokerage_limit: return "brokerage_limit";
    case TableViolation::Kind::persistence: return "persistence";
    case TableViolation::Kind::deadlock: return "deadlock";
  }
  return "unknown";
}

namespace {

std::string at_text(const Submatching& nu) { return "at {" + nu.key() + "}"; }

}  // namespace

ValidationReport validate_inheritance_table(const InheritanceTable& table) {
  using Kind = TableViolation::Kind;
  ValidationReport report;
  const int n = table.size();
  const auto reachable = reachable_submatchings(table);

  std::map<Submatching, Rights> known;
  for (const auto& nu : reachable) {
    const auto rights = table.rights_at(nu);
    if (!rights) {
      report.violations.push_back({Kind::missing_entry, nu, {}, {}, "no control rights " + at_text(nu)});
      continue;
    }
    known.emplace(nu, *rights);
    const AgentSet free_agents = nu.unmatched_agents();
    bool structurally_sound = true;
    for (ObjectId x : nu.unmatched_objects().members()) {
      const auto& r = rights->at(x);
      if (!r) {
        report.violations.push_back(
            {Kind::missing_right, nu, x, {}, "object " + object_name(x) + " has no controller " + at_text(nu)});
        structurally_sound = false;
      } else if (index(r->agent) >= n || !free_agents.contains(r->agent)) {
        report.violations.push_back({Kind::matched_controller, nu, x, r->agent,
                                     "object " + object_name(x) + " is controlled by matched agent " +
                                         agent_name(r->agent) + " " + at_text(nu)});
        structurally_sound = false;
      }
    }
    if (nu.pair_count() == 0) {
      const int brokers = rights->brokers().size();
      if (brokers > 1 && !(brokers == 3 && n == 3))
        report.violations.push_back({Kind::brokerage_limit, nu, {}, {},
                                     std::to_string(brokers) + " brokers at the first step with n=" +
                                         std::to_string(n) + "; allowed are 0, 1, or 3 when n=3"});
      if (three_broker_start(*rights)) continue;
    }
    if (structurally_sound) {
      for (AgentId i : free_agents.members()) {
        if (rights->brokered_by(i) == nu.unmatched_objects())
          report.violations.push_back({Kind::deadlock, nu, {}, i,
                                       "agent " + agent_name(i) + " brokers every remaining object " + at_text(nu)});
      }
    }
  }

  // Ownership persistence over nested reachable submatchings.
  std::set<std::pair<Submatching, int>> flagged;
  for (const auto& [outer, outer_rights] : known) {
    for (const auto& [inner, inner_rights] : known) {
      if (inner == outer || !outer.contains(inner)) continue;
      for (ObjectId x : inner.unmatched_objects().members()) {
        const auto& r = inner_rights.at(x);
        if (!r || r->kind != RightKind::owner || outer.matched(r->agent)) continue;
        const auto& later = outer_rights.at(x);
        if ((outer.object_matched(x) || !later || *later != *r) && flagged.emplace(outer, index(x)).second) {
          report.violations.push_back({Kind::persistence, outer, x, r->agent,
                                       "agent " + agent_name(r->agent) + " owns " + object_name(x) + " at {" +
                                           inner.key() + "} but not " + at_text(outer)});
        }
      }
    }
  }
  return report;
}

}  // namespace balmatch
