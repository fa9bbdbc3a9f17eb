#pragma once

// House-allocation mechanisms. Every mechanism is a pure function from a
// profile to a matching and is safe to evaluate concurrently.

#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "balmatch/core.hpp"
#include "balmatch/endowment.hpp"
#include "balmatch/inheritance.hpp"

namespace balmatch {

/// order[0] picks first, then order[1] picks among the remaining objects, ...
Matching serial_dictatorship(std::span<const AgentId> order, const Profile& profile);

/// Top trading cycles from individual endowments, clearing one cycle per step:
/// the cycle reached by following pointers from the lowest-indexed remaining
/// agent.
Matching ttc(const Endowment& omega, const Profile& profile);

/// TTC where each step clears a cycle drawn uniformly among all cycles of the
/// current pointing graph. The outcome does not depend on the draws.
Matching ttc_random_cycle_order(const Endowment& omega, const Profile& profile, std::mt19937_64& rng);

/// Efficient matchings that minimise the number of brokers receiving the
/// object they broker.
std::vector<Matching> broker_minimal_efficient_set(const BrokerageProfile& b, const Profile& profile);

/// Trading cycles with three brokers (n = 3 only). Throws UnsupportedSize
/// otherwise.
Matching tc_three_brokers(const BrokerageProfile& b, const Profile& profile);

/// Owner-and-broker trading cycles driven by an inheritance table. Owners
/// point to their top remaining object, brokers to their top remaining object
/// they do not broker, objects to their controller. A three-broker first step
/// is resolved by tc_three_brokers; a sole remaining agent takes the sole
/// remaining object. Throws MalformedTable when the table cannot drive the
/// algorithm at a reached submatching.
Matching owner_broker_tc(const InheritanceTable& table, const Profile& profile);

/// The two profiles singled out by the psi mechanism.
Profile psi_profile_hat();
Profile psi_profile_tilde();

/// TTC from (a,b,c) except at the two special profiles, where it returns
/// (b,c,a) and (c,a,b) respectively. n = 3 only.
Matching psi_example(const Profile& profile);

inline Matching constant(const Matching& mu, const Profile&) { return mu; }

/// A mechanism together with its parameters.
class Mechanism {
 public:
  struct SerialDictatorship {
    std::vector<AgentId> order;
  };
  struct Ttc {
    Endowment endowment;
  };
  struct Tc3b {
    BrokerageProfile brokerage;
  };
  struct OwnerBroker {
    std::shared_ptr<const InheritanceTable> table;
  };
  struct Constant {
    Matching matching;
  };
  struct PsiExample {};

  using Kind = std::variant<SerialDictatorship, Ttc, Tc3b, OwnerBroker, Constant, PsiExample>;

  static Mechanism serial_dictatorship(std::vector<AgentId> order);
  static Mechanism ttc(const Endowment& omega);
  static Mechanism tc3b(const BrokerageProfile& b);
  static Mechanism owner_broker(InheritanceTable table);
  static Mechanism constant(const Matching& mu);
  static Mechanism psi_example();

  int size() const { return n_; }
  const Kind& kind() const { return kind_; }
  /// "serial_dictatorship", "ttc", "tc3b", "owner_broker", "constant" or "psi_example".
  std::string name() const;

  /// Throws InvalidInput if the profile size differs from size().
  Matching operator()(const Profile& profile) const;

 private:
  Mechanism(Kind kind, int n) : kind_(std::move(kind)), n_(n) {}

  Kind kind_;
  int n_;
};

}  // namespace balmatch
