#pragma once

// Exhaustive and sampled verification of allocation axioms: balancedness
// tallies, efficiency, (group) strategy-proofness, rank-sum identities and
// symmetrization equivalence.
//
// Verification arithmetic is exact (integer counts, rational weights with a
// common denominator). Floating point appears only in Monte Carlo summaries.
//
// Witness order is canonical and independent of the worker count:
//   efficiency             first profile in enumeration order;
//   strategy-proofness     agent, then profile, then misreport (Lehmer order);
//   group strategy-proof.  coalition size, then lexicographic member set, then
//                          profile, then joint misreport (Lehmer order, first
//                          member most significant).
// Sampled modes report the violation with the smallest sample index.

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "balmatch/core.hpp"
#include "balmatch/mechanisms.hpp"
#include "balmatch/profile_space.hpp"

namespace balmatch {

struct ExecOptions {
  int workers = 1;
};

enum class Mode { exhaustive, sample };

struct CheckOptions {
  Mode mode = Mode::exhaustive;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// counts(i, r): number of profiles where agent i receives her rank-r object.
class TallyMatrix {
 public:
  TallyMatrix() = default;
  TallyMatrix(int n, std::uint64_t total);

  int n() const { return n_; }
  std::uint64_t total() const { return total_; }

  std::uint64_t count(AgentId i, Rank r) const {
    return counts_[static_cast<std::size_t>(index(i) * n_ + r.value - 1)];
  }
  void add(AgentId i, Rank r, std::uint64_t k = 1) {
    counts_[static_cast<std::size_t>(index(i) * n_ + r.value - 1)] += k;
  }
  std::vector<std::uint64_t> row(AgentId i) const;
  std::uint64_t column_sum(Rank r) const;

  /// Entry-wise sum; totals add.
  TallyMatrix& operator+=(const TallyMatrix& other);

  friend bool operator==(const TallyMatrix&, const TallyMatrix&) = default;

 private:
  int n_ = 0;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> counts_;
};

struct Inefficiency {
  Matching outcome;
  Matching dominating;
};

/// `misreport` is the full reported profile (R'_S, R_-S).
struct Manipulation {
  std::vector<AgentId> coalition;
  Profile misreport;
  Matching truthful;
  Matching manipulated;
};

struct Imbalance {
  AgentId first{};
  AgentId second{};
  Rank rank;
  std::uint64_t first_count = 0;
  std::uint64_t second_count = 0;
};

struct AxiomWitness {
  enum class Kind { inefficiency, manipulation, coalition_manipulation, imbalance };

  Kind kind;
  Profile profile;  // unused for imbalance
  std::variant<Inefficiency, Manipulation, Imbalance> detail;
};

std::string to_string(AxiomWitness::Kind kind);

/// Outcome of every profile of the space, in enumeration order.
std::vector<Matching> outcome_table(const Mechanism& f, const ProfileSpace& space, int workers = 1);

TallyMatrix balancedness_tally(const Mechanism& f, int n, ExecOptions exec = {});
bool is_balanced(const TallyMatrix& t);
/// First (agent 1 vs agent j, rank) cell pair that differs, scanning ranks
/// then agents.
std::optional<AxiomWitness> imbalance_witness(const TallyMatrix& t);

bool is_efficient_matching(const Matching& mu, const Profile& profile);
/// nullopt if efficient; otherwise a witness carrying a dominating matching.
std::optional<AxiomWitness> efficiency_witness(const Matching& mu, const Profile& profile);

/// nullopt means the axiom holds on every checked profile.
std::optional<AxiomWitness> check_efficiency(const Mechanism& f, int n, const CheckOptions& opts = {});
std::optional<AxiomWitness> check_strategy_proof(const Mechanism& f, int n, const CheckOptions& opts = {});
/// Exhaustive mode refuses n >= 4 with a cost estimate (ExhaustionLimitExceeded).
std::optional<AxiomWitness> check_group_strategy_proof(const Mechanism& f, int n, const CheckOptions& opts = {});

inline constexpr int kGspExhaustiveLimit = 3;

/// Re-runs the mechanism on the witness and reports whether the violation
/// reproduces. Imbalance witnesses need the tally and are not replayable here.
bool replay_witness(const AxiomWitness& w, const Mechanism& f);

/// Exact distribution of the symmetrized mechanism at one profile. Weights
/// are numerators over the common denominator n!.
struct MatchingDistribution {
  std::uint64_t denominator = 1;
  std::map<Matching, std::uint64_t> numerators;

  std::uint64_t total_weight() const;
  friend bool operator==(const MatchingDistribution&, const MatchingDistribution&) = default;
};

/// f^pi(R)_i = f(tau^pi(R))_{pi^{-1}(i)} over all n! permutations pi, where
/// tau^pi(R)_k = R_{pi(k)}: each agent gets the outcome of the role that
/// carries her ranking.
MatchingDistribution symmetrized_distribution(const Mechanism& f, const Profile& profile);

/// First profile at which the symmetrized distributions differ, or nullopt.
std::optional<Profile> check_symmetrization_equiv(const Mechanism& f, const Mechanism& g, int n,
                                                  ExecOptions exec = {});

struct RankSumComparison {
  std::vector<std::uint64_t> f_sums;  // index r-1 holds the rank-r column sum
  std::vector<std::uint64_t> g_sums;
  std::optional<Rank> first_mismatch;
  bool equal() const { return !first_mismatch; }
};

RankSumComparison check_rank_sum_equality(const Mechanism& f, const Mechanism& g, int n, ExecOptions exec = {});

/// Compares the top-choice sets of a one-broker mechanism (agent i brokers her
/// endowment, others own theirs, endowment a,b,c,...) and TTC from the same
/// endowment.
struct TopSetInclusion {
  std::uint64_t broker_mechanism_top = 0;  // |{R : TC(R)_i top}|
  std::uint64_t ttc_top = 0;               // |{R : TTC(R)_i top}|
  std::optional<Profile> subset_counterexample;
  Profile strictness_profile;  // all agents rank h_i first, h_j second
  bool strictness_witnessed = false;

  bool passed() const { return !subset_counterexample && strictness_witnessed && broker_mechanism_top < ttc_top; }
};

TopSetInclusion check_top_set_inclusion(AgentId i, int n, ExecOptions exec = {});

struct MonteCarloTally {
  TallyMatrix counts;
  std::uint64_t seed = 0;

  double frequency(AgentId i, Rank r) const;
  /// Binomial standard error sqrt(p(1-p)/samples).
  double standard_error(AgentId i, Rank r) const;
  /// Largest pairwise difference between agents' top-choice frequencies.
  double max_top_discrepancy() const;
};

/// Throws InvalidInput if samples == 0.
MonteCarloTally monte_carlo_tally(const Mechanism& f, int n, std::uint64_t samples, std::uint64_t seed,
                                  ExecOptions exec = {});

}  // namespace balmatch
