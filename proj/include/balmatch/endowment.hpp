#pragma once

#include "balmatch/core.hpp"

namespace balmatch {

/// Individual endowments: agent i owns of(i).
class Endowment {
 public:
  explicit Endowment(const Matching& owner_of) : owner_of_(owner_of) {}
  static Endowment identity(int n) { return Endowment(Matching::identity(n)); }

  int size() const { return owner_of_.size(); }
  ObjectId of(AgentId i) const { return owner_of_[i]; }
  AgentId owner(ObjectId x) const { return owner_of_.holder(x); }
  const Matching& as_matching() const { return owner_of_; }

  friend auto operator<=>(const Endowment&, const Endowment&) = default;

 private:
  Matching owner_of_;
};

/// Brokerage profile for three agents: agent i brokers of(i).
class BrokerageProfile {
 public:
  /// Throws UnsupportedSize unless the matching has exactly three agents.
  explicit BrokerageProfile(const Matching& brokers);
  static BrokerageProfile identity() { return BrokerageProfile(Matching::identity(3)); }

  int size() const { return 3; }
  ObjectId of(AgentId i) const { return brokers_[i]; }
  AgentId broker(ObjectId x) const { return brokers_.holder(x); }
  const Matching& as_matching() const { return brokers_; }

  friend auto operator<=>(const BrokerageProfile&, const BrokerageProfile&) = default;

 private:
  Matching brokers_;
};

}  // namespace balmatch
