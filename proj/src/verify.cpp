#include "balmatch/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "balmatch/parallel.hpp"
#include "balmatch/pareto.hpp"
#include "balmatch/sampling.hpp"

namespace balmatch {

namespace {

constexpr std::uint64_t kNoViolation = std::numeric_limits<std::uint64_t>::max();

void atomic_min(std::atomic<std::uint64_t>& target, std::uint64_t value) {
  std::uint64_t cur = target.load();
  while (value < cur && !target.compare_exchange_weak(cur, value)) {
  }
}

void require_mechanism_size(const Mechanism& f, int n) {
  if (f.size() != n)
    throw InvalidInput(f.name() + " mechanism has size " + std::to_string(f.size()) + ", requested n=" +
                       std::to_string(n));
}

// True if `after` is weakly better for every member and strictly better for one.
bool coalition_gains(const Profile& truth, std::span<const AgentId> members, const Matching& before,
                     const Matching& after) {
  bool strict = false;
  for (AgentId i : members) {
    const Preference& p = truth[i];
    const int now = p.position_of(before[i]);
    const int alt = p.position_of(after[i]);
    if (alt > now) return false;
    if (alt < now) strict = true;
  }
  return strict;
}

std::vector<std::uint64_t> digit_weights(const ProfileSpace& space) {
  std::vector<std::uint64_t> w(static_cast<std::size_t>(space.n()));
  std::uint64_t acc = 1;
  for (int i = space.n() - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = acc;
    acc *= factorial(space.n());
  }
  return w;
}

// Coalitions ordered by size, then lexicographically by member list.
std::vector<std::vector<AgentId>> coalitions_in_order(int n, int max_size) {
  std::vector<std::vector<AgentId>> out;
  for (int size = 1; size <= max_size; ++size) {
    std::vector<std::vector<AgentId>> level;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (std::popcount(mask) != size) continue;
      std::vector<AgentId> members;
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) members.push_back(agent(i));
      level.push_back(std::move(members));
    }
    std::sort(level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

struct ManipulationHit {
  std::uint64_t profile_index = kNoViolation;
  std::uint64_t misreport_index = 0;
};

// First (profile, joint misreport) in canonical order at which the coalition
// gains, using precomputed outcomes.
ManipulationHit first_manipulation(const ProfileSpace& space, const std::vector<Matching>& outcomes,
                                   const std::vector<AgentId>& members, int workers) {
  const auto weights = digit_weights(space);
  const std::uint64_t radix = factorial(space.n());
  std::uint64_t joint = 1;
  for (std::size_t k = 0; k < members.size(); ++k) joint *= radix;

  const int parts = effective_parts(space.size(), workers);
  std::vector<ManipulationHit> hits(static_cast<std::size_t>(parts));
  std::atomic<std::uint64_t> best{kNoViolation};

  parallel_ranges(space.size(), workers, [&](int part, IndexRange range) {
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& truth) {
      if (r > best.load(std::memory_order_relaxed)) return false;
      std::uint64_t base = r;
      for (AgentId i : members) base -= truth[i].lehmer_code() * weights[static_cast<std::size_t>(index(i))];
      const Matching& before = outcomes[r];
      for (std::uint64_t m = 0; m < joint; ++m) {
        std::uint64_t idx = base;
        std::uint64_t rest = m;
        for (std::size_t k = members.size(); k-- > 0;) {
          idx += (rest % radix) * weights[static_cast<std::size_t>(index(members[k]))];
          rest /= radix;
        }
        if (coalition_gains(truth, members, before, outcomes[idx])) {
          hits[static_cast<std::size_t>(part)] = {r, m};
          atomic_min(best, r);
          return false;
        }
      }
      return true;
    });
  });

  ManipulationHit first;
  for (const auto& h : hits)
    if (h.profile_index < first.profile_index) first = h;
  return first;
}

AxiomWitness manipulation_witness(const ProfileSpace& space, const std::vector<Matching>& outcomes,
                                  const std::vector<AgentId>& members, ManipulationHit hit) {
  const Profile truth = space.at(hit.profile_index);
  Profile reported = truth;
  const std::uint64_t radix = factorial(space.n());
  std::uint64_t rest = hit.misreport_index;
  for (std::size_t k = members.size(); k-- > 0;) {
    reported.set(members[k], space.preferences()[rest % radix]);
    rest /= radix;
  }
  Manipulation m{members, reported, outcomes[hit.profile_index], outcomes[space.index_of(reported)]};
  return AxiomWitness{members.size() == 1 ? AxiomWitness::Kind::manipulation : AxiomWitness::Kind::coalition_manipulation,
                      truth, m};
}

std::optional<AxiomWitness> exhaustive_manipulation(const Mechanism& f, int n, int max_coalition, int workers) {
  const ProfileSpace space(n);
  const auto outcomes = outcome_table(f, space, workers);
  for (const auto& members : coalitions_in_order(n, max_coalition)) {
    const auto hit = first_manipulation(space, outcomes, members, workers);
    if (hit.profile_index != kNoViolation) return manipulation_witness(space, outcomes, members, hit);
  }
  return std::nullopt;
}

// Runs fn(sample_index, rng) -> optional<AxiomWitness> over all samples and
// returns the witness with the smallest sample index.
template <class Fn>
std::optional<AxiomWitness> first_sampled_violation(const CheckOptions& opts, Fn&& fn) {
  if (opts.samples == 0) throw InvalidInput("sample mode needs at least one sample");
  const std::uint64_t blocks = block_count(opts.samples);
  const int parts = effective_parts(blocks, opts.workers);
  std::vector<std::pair<std::uint64_t, std::optional<AxiomWitness>>> found(static_cast<std::size_t>(parts),
                                                                            {kNoViolation, std::nullopt});
  std::atomic<std::uint64_t> best{kNoViolation};
  parallel_ranges(blocks, opts.workers, [&](int part, IndexRange range) {
    for_each_sample(opts.samples, opts.seed, range.begin, range.end, [&](std::uint64_t s, std::mt19937_64& rng) {
      if (s > best.load(std::memory_order_relaxed)) return false;
      if (auto w = fn(rng)) {
        found[static_cast<std::size_t>(part)] = {s, std::move(w)};
        atomic_min(best, s);
        return false;
      }
      return true;
    });
  });
  std::optional<AxiomWitness> first;
  std::uint64_t first_index = kNoViolation;
  for (auto& [s, w] : found)
    if (s < first_index) {
      first_index = s;
      first = std::move(w);
    }
  return first;
}

std::optional<AxiomWitness> sampled_manipulation(const Mechanism& f, int n, bool coalitions, const CheckOptions& opts) {
  return first_sampled_violation(opts, [&](std::mt19937_64& rng) -> std::optional<AxiomWitness> {
    const Profile truth = random_profile(n, rng);
    std::vector<AgentId> members;
    if (coalitions) {
      const auto mask = 1 + uniform_below(rng, (1u << n) - 1u);
      for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) members.push_back(agent(i));
    } else {
      members.push_back(agent(static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)))));
    }
    Profile reported = truth;
    for (AgentId i : members) reported.set(i, random_preference(n, rng));
    const Matching before = f(truth);
    const Matching after = f(reported);
    if (!coalition_gains(truth, members, before, after)) return std::nullopt;
    const auto kind = members.size() == 1 ? AxiomWitness::Kind::manipulation : AxiomWitness::Kind::coalition_manipulation;
    return AxiomWitness{kind, truth, Manipulation{members, reported, before, after}};
  });
}

}  // namespace

std::string to_string(AxiomWitness::Kind kind) {
  switch (kind) {
    case AxiomWitness::Kind::inefficiency: return "inefficiency";
    case AxiomWitness::Kind::manipulation: return "manipulation";
    case AxiomWitness::Kind::coalition_manipulation: return "coalition_manipulation";
    case AxiomWitness::Kind::imbalance: return "imbalance";
  }
  return "unknown";
}

TallyMatrix::TallyMatrix(int n, std::uint64_t total)
    : n_(n), total_(total), counts_(static_cast<std::size_t>(n * n), 0) {}

std::vector<std::uint64_t> TallyMatrix::row(AgentId i) const {
  const auto begin = counts_.begin() + index(i) * n_;
  return {begin, begin + n_};
}

std::uint64_t TallyMatrix::column_sum(Rank r) const {
  std::uint64_t s = 0;
  for (int i = 0; i < n_; ++i) s += count(agent(i), r);
  return s;
}

TallyMatrix& TallyMatrix::operator+=(const TallyMatrix& other) {
  if (other.n_ != n_) throw InvalidInput("cannot merge tallies of different sizes");
  total_ += other.total_;
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  return *this;
}

std::vector<Matching> outcome_table(const Mechanism& f, const ProfileSpace& space, int workers) {
  require_mechanism_size(f, space.n());
  std::vector<Matching> out(space.size());
  parallel_ranges(space.size(), workers, [&](int, IndexRange range) {
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& p) {
      out[r] = f(p);
      return true;
    });
  });
  return out;
}

TallyMatrix balancedness_tally(const Mechanism& f, int n, ExecOptions exec) {
  require_mechanism_size(f, n);
  const ProfileSpace space = enumerate_profiles(n);
  const int parts = effective_parts(space.size(), exec.workers);
  std::vector<TallyMatrix> partial(static_cast<std::size_t>(parts), TallyMatrix(n, 0));
  parallel_ranges(space.size(), exec.workers, [&](int part, IndexRange range) {
    TallyMatrix t(n, range.end - range.begin);
    space.for_each(range.begin, range.end, [&](std::uint64_t, const Profile& p) {
      const Matching mu = f(p);
      for (int i = 0; i < n; ++i) t.add(agent(i), rank_of(p.of(i), mu.of(i)));
      return true;
    });
    partial[static_cast<std::size_t>(part)] = std::move(t);
  });
  TallyMatrix total(n, 0);
  for (const auto& t : partial) total += t;
  return total;
}

bool is_balanced(const TallyMatrix& t) { return !imbalance_witness(t); }

std::optional<AxiomWitness> imbalance_witness(const TallyMatrix& t) {
  for (int r = 1; r <= t.n(); ++r) {
    const std::uint64_t reference = t.count(agent(0), Rank{r});
    for (int j = 1; j < t.n(); ++j) {
      const std::uint64_t other = t.count(agent(j), Rank{r});
      if (other != reference) return AxiomWitness{AxiomWitness::Kind::imbalance, Profile{}, Imbalance{agent(0), agent(j), Rank{r}, reference, other}};
    }
  }
  return std::nullopt;
}

bool is_efficient_matching(const Matching& mu, const Profile& profile) {
  return !find_dominating_matching(mu, profile);
}

std::optional<AxiomWitness> efficiency_witness(const Matching& mu, const Profile& profile) {
  if (auto better = find_dominating_matching(mu, profile))
    return AxiomWitness{AxiomWitness::Kind::inefficiency, profile, Inefficiency{mu, *better}};
  return std::nullopt;
}

std::optional<AxiomWitness> check_efficiency(const Mechanism& f, int n, const CheckOptions& opts) {
  require_mechanism_size(f, n);
  if (opts.mode == Mode::sample)
    return first_sampled_violation(opts, [&](std::mt19937_64& rng) {
      const Profile p = random_profile(n, rng);
      return efficiency_witness(f(p), p);
    });

  const ProfileSpace space = enumerate_profiles(n);
  const int parts = effective_parts(space.size(), opts.workers);
  std::vector<std::optional<AxiomWitness>> found(static_cast<std::size_t>(parts));
  std::atomic<std::uint64_t> best{kNoViolation};
  parallel_ranges(space.size(), opts.workers, [&](int part, IndexRange range) {
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& p) {
      if (r > best.load(std::memory_order_relaxed)) return false;
      if (auto w = efficiency_witness(f(p), p)) {
        found[static_cast<std::size_t>(part)] = std::move(w);
        atomic_min(best, r);
        return false;
      }
      return true;
    });
  });
  for (auto& w : found)  // parts are contiguous and ordered, so the first hit is the minimum
    if (w) return w;
  return std::nullopt;
}

std::optional<AxiomWitness> check_strategy_proof(const Mechanism& f, int n, const CheckOptions& opts) {
  require_mechanism_size(f, n);
  if (opts.mode == Mode::sample) return sampled_manipulation(f, n, false, opts);
  require_exhaustive(n);
  return exhaustive_manipulation(f, n, 1, opts.workers);
}

std::optional<AxiomWitness> check_group_strategy_proof(const Mechanism& f, int n, const CheckOptions& opts) {
  require_mechanism_size(f, n);
  if (opts.mode == Mode::sample) return sampled_manipulation(f, n, true, opts);
  if (n > kGspExhaustiveLimit) {
    // sum over coalitions S of (n!)^|S| joint misreports per profile
    double per_profile = 0;
    for (int k = 1; k <= n; ++k) {
      double binom = 1;
      for (int t = 0; t < k; ++t) binom = binom * (n - t) / (t + 1);
      per_profile += binom * std::pow(static_cast<double>(factorial(n)), k);
    }
    const double total = per_profile * std::pow(static_cast<double>(factorial(n)), n);
    throw ExhaustionLimitExceeded("exhaustive group strategy-proofness check at n=" + std::to_string(n) +
                                  " needs about " + std::to_string(static_cast<long double>(total)) +
                                  " (profile, coalition, misreport) evaluations; exhaustive mode is limited to n<=" +
                                  std::to_string(kGspExhaustiveLimit) + ", use sample mode");
  }
  require_exhaustive(n);
  return exhaustive_manipulation(f, n, n, opts.workers);
}

bool replay_witness(const AxiomWitness& w, const Mechanism& f) {
  switch (w.kind) {
    case AxiomWitness::Kind::inefficiency: {
      const auto& d = std::get<Inefficiency>(w.detail);
      const Matching mu = f(w.profile);
      return mu == d.outcome && pareto_dominates(d.dominating, mu, w.profile);
    }
    case AxiomWitness::Kind::manipulation:
    case AxiomWitness::Kind::coalition_manipulation: {
      const auto& d = std::get<Manipulation>(w.detail);
      AgentSet in_coalition;
      for (AgentId i : d.coalition) in_coalition.insert(i);
      for (int i = 0; i < w.profile.size(); ++i)
        if (!in_coalition.contains(agent(i)) && w.profile.of(i) != d.misreport.of(i)) return false;
      const Matching before = f(w.profile);
      const Matching after = f(d.misreport);
      return before == d.truthful && after == d.manipulated && coalition_gains(w.profile, d.coalition, before, after);
    }
    case AxiomWitness::Kind::imbalance:
      return false;
  }
  return false;
}

std::uint64_t MatchingDistribution::total_weight() const {
  std::uint64_t s = 0;
  for (const auto& [mu, w] : numerators) s += w;
  return s;
}

namespace {

// The matching f^pi(R) given f's outcome at tau^pi(R). Agent i's ranking sits
// at position pi^{-1}(i) of tau^pi(R), so that is the outcome she receives.
Matching permuted_outcome(const Matching& at_permuted, const Permutation& pi_inverse) {
  std::array<ObjectId, kMaxSize> a{};
  for (int i = 0; i < pi_inverse.size(); ++i) a[static_cast<std::size_t>(i)] = at_permuted.of(pi_inverse(i));
  return Matching::from_assignment(std::span<const ObjectId>(a.data(), static_cast<std::size_t>(pi_inverse.size())));
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<Permutation> out;
  for (std::uint64_t k = 0; k < factorial(n); ++k) out.push_back(Permutation::from_lehmer(n, k));
  return out;
}

}  // namespace

MatchingDistribution symmetrized_distribution(const Mechanism& f, const Profile& profile) {
  const int n = profile.size();
  require_mechanism_size(f, n);
  MatchingDistribution d;
  d.denominator = factorial(n);
  for (const Permutation& pi : all_permutations(n))
    ++d.numerators[permuted_outcome(f(permute_agents(profile, pi)), pi.inverse())];
  return d;
}

std::optional<Profile> check_symmetrization_equiv(const Mechanism& f, const Mechanism& g, int n, ExecOptions exec) {
  require_mechanism_size(f, n);
  require_mechanism_size(g, n);
  const ProfileSpace space = enumerate_profiles(n);
  const auto f_out = outcome_table(f, space, exec.workers);
  const auto g_out = outcome_table(g, space, exec.workers);
  const auto perms = all_permutations(n);
  std::vector<Permutation> inverses;
  for (const Permutation& pi : perms) inverses.push_back(pi.inverse());
  const auto weights = digit_weights(space);

  const int parts = effective_parts(space.size(), exec.workers);
  std::vector<std::uint64_t> found(static_cast<std::size_t>(parts), kNoViolation);
  std::atomic<std::uint64_t> best{kNoViolation};
  parallel_ranges(space.size(), exec.workers, [&](int part, IndexRange range) {
    std::vector<Matching> fs, gs;
    std::array<std::uint64_t, kMaxSize> code{};
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& p) {
      if (r > best.load(std::memory_order_relaxed)) return false;
      for (int i = 0; i < n; ++i) code[static_cast<std::size_t>(i)] = p.of(i).lehmer_code();
      fs.clear();
      gs.clear();
      for (std::size_t q = 0; q < perms.size(); ++q) {
        std::uint64_t permuted = 0;
        for (int k = 0; k < n; ++k)
          permuted += code[static_cast<std::size_t>(perms[q](k))] * weights[static_cast<std::size_t>(k)];
        fs.push_back(permuted_outcome(f_out[permuted], inverses[q]));
        gs.push_back(permuted_outcome(g_out[permuted], inverses[q]));
      }
      std::sort(fs.begin(), fs.end());
      std::sort(gs.begin(), gs.end());
      if (fs != gs) {
        found[static_cast<std::size_t>(part)] = r;
        atomic_min(best, r);
        return false;
      }
      return true;
    });
  });
  for (std::uint64_t r : found)
    if (r != kNoViolation) return space.at(r);
  return std::nullopt;
}

RankSumComparison check_rank_sum_equality(const Mechanism& f, const Mechanism& g, int n, ExecOptions exec) {
  const TallyMatrix tf = balancedness_tally(f, n, exec);
  const TallyMatrix tg = balancedness_tally(g, n, exec);
  RankSumComparison out;
  for (int r = 1; r <= n; ++r) {
    out.f_sums.push_back(tf.column_sum(Rank{r}));
    out.g_sums.push_back(tg.column_sum(Rank{r}));
    if (!out.first_mismatch && out.f_sums.back() != out.g_sums.back()) out.first_mismatch = Rank{r};
  }
  return out;
}

TopSetInclusion check_top_set_inclusion(AgentId i, int n, ExecOptions exec) {
  if (n < 2) throw InvalidInput("top-set inclusion needs at least two agents");
  if (index(i) >= n) throw InvalidInput("agent outside the instance");
  const Endowment omega = Endowment::identity(n);
  const Mechanism broker_mech = Mechanism::owner_broker(make_one_broker_table(i, omega));
  const Mechanism ttc_mech = Mechanism::ttc(omega);
  const ProfileSpace space = enumerate_profiles(n);

  struct Part {
    std::uint64_t broker_top = 0, ttc_top = 0, counterexample = kNoViolation;
  };
  const int parts = effective_parts(space.size(), exec.workers);
  std::vector<Part> partial(static_cast<std::size_t>(parts));
  parallel_ranges(space.size(), exec.workers, [&](int part, IndexRange range) {
    Part acc;
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& p) {
      const ObjectId top = p[i].top();
      const bool tc = broker_mech(p)[i] == top;
      const bool tt = ttc_mech(p)[i] == top;
      acc.broker_top += tc ? 1 : 0;
      acc.ttc_top += tt ? 1 : 0;
      if (tc && !tt && acc.counterexample == kNoViolation) acc.counterexample = r;
      return true;
    });
    partial[static_cast<std::size_t>(part)] = acc;
  });

  TopSetInclusion out;
  for (const auto& p : partial) {
    out.broker_mechanism_top += p.broker_top;
    out.ttc_top += p.ttc_top;
    if (!out.subset_counterexample && p.counterexample != kNoViolation)
      out.subset_counterexample = space.at(p.counterexample);
  }

  const AgentId j = agent(index(i) == 0 ? 1 : 0);
  std::vector<ObjectId> ranking{omega.of(i), omega.of(j)};
  for (int x = 0; x < n; ++x)
    if (object(x) != omega.of(i) && object(x) != omega.of(j)) ranking.push_back(object(x));
  const Preference shared = Preference::from_ranking(ranking);
  const std::vector<Preference> prefs(static_cast<std::size_t>(n), shared);
  out.strictness_profile = Profile(prefs);
  out.strictness_witnessed = ttc_mech(out.strictness_profile)[i] == shared.top() &&
                             broker_mech(out.strictness_profile)[i] != shared.top();
  return out;
}

double MonteCarloTally::frequency(AgentId i, Rank r) const {
  return static_cast<double>(counts.count(i, r)) / static_cast<double>(counts.total());
}

double MonteCarloTally::standard_error(AgentId i, Rank r) const {
  const double p = frequency(i, r);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(counts.total()));
}

double MonteCarloTally::max_top_discrepancy() const {
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < counts.n(); ++i) {
    const double f = frequency(agent(i), Rank{1});
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return hi - lo;
}

MonteCarloTally monte_carlo_tally(const Mechanism& f, int n, std::uint64_t samples, std::uint64_t seed,
                                  ExecOptions exec) {
  require_mechanism_size(f, n);
  if (samples == 0) throw InvalidInput("Monte Carlo tally needs at least one sample");
  const std::uint64_t blocks = block_count(samples);
  const int parts = effective_parts(blocks, exec.workers);
  std::vector<TallyMatrix> partial(static_cast<std::size_t>(parts), TallyMatrix(n, 0));
  parallel_ranges(blocks, exec.workers, [&](int part, IndexRange range) {
    TallyMatrix t(n, 0);
    std::uint64_t drawn = 0;
    for_each_sample(samples, seed, range.begin, range.end, [&](std::uint64_t, std::mt19937_64& rng) {
      const Profile p = random_profile(n, rng);
      const Matching mu = f(p);
      for (int i = 0; i < n; ++i) t.add(agent(i), rank_of(p.of(i), mu.of(i)));
      ++drawn;
      return true;
    });
    TallyMatrix sized(n, drawn);
    sized += t;
    partial[static_cast<std::size_t>(part)] = std::move(sized);
  });
  MonteCarloTally out{TallyMatrix(n, 0), seed};
  for (const auto& t : partial) out.counts += t;
  return out;
}

}  // namespace balmatch
