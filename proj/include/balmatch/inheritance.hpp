#pragma once

// Inheritance structures for the owner-and-broker trading-cycles algorithm.
//
// A table assigns to each submatching nu (with at least two unmatched agents)
// and each unmatched object x a control right: an unmatched agent who either
// owns or brokers x. Tables come in two flavours:
//   - explicit: a finite map from submatching to rights (JSON table files);
//   - generated: a rule evaluated on demand, so that n=4 tables need not be
//     materialized. Rules are pure functions and safe to share across threads.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "balmatch/core.hpp"
#include "balmatch/endowment.hpp"

namespace balmatch {

enum class RightKind : std::uint8_t { owner, broker };

struct ControlRight {
  AgentId agent{};
  RightKind kind = RightKind::owner;

  friend auto operator<=>(const ControlRight&, const ControlRight&) = default;
};

class MalformedTable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Control rights over the objects of one step, indexed by object.
class Rights {
 public:
  Rights() = default;
  explicit Rights(int n) : n_(static_cast<std::uint8_t>(n)) {}

  int size() const { return n_; }
  const std::optional<ControlRight>& at(ObjectId x) const { return rights_[static_cast<std::size_t>(index(x))]; }
  void set(ObjectId x, ControlRight r) { rights_[static_cast<std::size_t>(index(x))] = r; }

  /// Objects the agent brokers.
  ObjectSet brokered_by(AgentId i) const;
  /// Distinct agents holding at least one broker right.
  AgentSet brokers() const;

  friend auto operator<=>(const Rights&, const Rights&) = default;

 private:
  std::array<std::optional<ControlRight>, kMaxSize> rights_{};
  std::uint8_t n_ = 0;
};

class InheritanceTable {
 public:
  using Rule = std::function<Rights(const Submatching&)>;

  /// Explicit table. Entries are taken as given; use
  /// validate_inheritance_table to check them.
  static InheritanceTable from_entries(int n, std::map<Submatching, Rights> entries);
  /// Generated table; `rule` must be deterministic.
  static InheritanceTable from_rule(int n, Rights initial, Rule rule);

  int size() const { return n_; }
  bool generated() const { return static_cast<bool>(rule_); }

  /// Rights at nu, or nullopt if the table has no entry for it.
  std::optional<Rights> rights_at(const Submatching& nu) const;
  Rights initial() const;

  /// The explicit entries (empty for generated tables).
  const std::map<Submatching, Rights>& entries() const { return entries_; }

 private:
  int n_ = 0;
  std::map<Submatching, Rights> entries_;
  Rights initial_;
  Rule rule_;
};

/// Table driven by initial rights plus persistence: at every submatching an
/// unmatched object keeps its initial controller (with the same kind) while
/// that controller is unmatched; otherwise it is owned by the lowest-indexed
/// unmatched agent.
InheritanceTable make_persistent_table(const Rights& initial);

/// Zero-broker table equivalent to TTC from the endowment.
InheritanceTable make_ttc_table(const Endowment& omega);

/// Agent `broker` brokers her endowment, every other agent owns hers.
InheritanceTable make_one_broker_table(AgentId broker, const Endowment& omega);

/// Submatchings with at least two unmatched agents that some sequence of
/// single-cycle clearings can reach from the empty submatching. A three-broker
/// initial step (n=3) resolves in one shot, so only the empty submatching is
/// returned in that case. Submatchings where the table has no entry are
/// reported but not expanded.
std::vector<Submatching> reachable_submatchings(const InheritanceTable& table);

/// Copies a (typically generated) table into an explicit one over its
/// reachable submatchings.
InheritanceTable materialize(const InheritanceTable& table);

struct TableViolation {
  enum class Kind { missing_entry, missing_right, matched_controller, brokerage_limit, persistence, deadlock };
  Kind kind;
  Submatching at;
  std::optional<ObjectId> object;
  std::optional<AgentId> agent;
  std::string message;
};

struct ValidationReport {
  std::vector<TableViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks completeness on reachable submatchings, initial brokerage limits,
/// and ownership persistence. Passing does not certify that the induced
/// mechanism is efficient or group strategy-proof.
ValidationReport validate_inheritance_table(const InheritanceTable& table);

std::string to_string(TableViolation::Kind kind);

}  // namespace balmatch
