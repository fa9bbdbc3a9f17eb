#pragma once

// The reproduction battery: ten pinned checks over small instances, shared by
// the acceptance test and the `paper-repro` subcommand.

#include <optional>
#include <string>
#include <vector>

#include "balmatch/verify.hpp"

namespace balmatch {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Runs criteria 1..10 in order. Exceptions inside a criterion mark it failed
/// with the message as detail; later criteria still run.
std::vector<CriterionResult> run_reproduction(ExecOptions exec = {});

/// Runs a single criterion (1..10).
CriterionResult run_criterion(int id, ExecOptions exec = {});

/// One line per criterion: "[PASS] 1 title: detail".
std::string format_results(const std::vector<CriterionResult>& results);

// Property suites. Each returns a description of the first failing instance,
// or nullopt when the property holds on every instance.

/// TTC endowment swap: for every endowment, ordered pair i != j and profile,
/// agent i's rank at R equals agent j's rank at the swapped profile.
std::optional<std::string> tau_swap_property(int n, ExecOptions exec = {});

/// TC3B relabel equivariance over every pair of brokerage profiles.
std::optional<std::string> pi_relabel_property(ExecOptions exec = {});

/// TTC with random cycle-clearing orders equals canonical TTC, for every
/// endowment and profile, `seeds` orders per profile.
std::optional<std::string> cycle_order_property(int n, int seeds, ExecOptions exec = {});

/// The generated TTC table drives owner_broker_tc to TTC outcomes:
/// exhaustively (samples == 0) or on `samples` seeded profiles.
std::optional<std::string> ttc_table_property(const Endowment& omega, std::uint64_t samples, std::uint64_t seed,
                                              ExecOptions exec = {});

}  // namespace balmatch
