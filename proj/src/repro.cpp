#include "balmatch/repro.hpp"

#include <atomic>
#include <limits>
#include <sstream>

#include "balmatch/codec.hpp"
#include "balmatch/parallel.hpp"
#include "balmatch/sampling.hpp"

namespace balmatch {

namespace {

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

std::string row_text(const std::vector<std::uint64_t>& row) {
  std::ostringstream out;
  out << '(';
  for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
  out << ')';
  return out.str();
}

std::string mech_text(const Mechanism& f) {
  struct Visitor {
    std::string operator()(const Mechanism::SerialDictatorship& m) const {
      std::string s = "sd[";
      for (AgentId i : m.order) s += agent_name(i);
      return s + "]";
    }
    std::string operator()(const Mechanism::Ttc& m) const { return "ttc" + format_matching(m.endowment.as_matching()); }
    std::string operator()(const Mechanism::Tc3b& m) const { return "tc3b" + format_matching(m.brokerage.as_matching()); }
    std::string operator()(const Mechanism::OwnerBroker&) const { return "owner_broker"; }
    std::string operator()(const Mechanism::Constant& m) const { return "constant" + format_matching(m.matching); }
    std::string operator()(const Mechanism::PsiExample&) const { return "psi"; }
  };
  return std::visit(Visitor{}, f.kind());
}

// Scans all profiles of size n; returns the failure at the smallest index.
template <class Pred>
std::optional<std::string> first_failure(int n, ExecOptions exec, Pred&& pred) {
  const ProfileSpace space = enumerate_profiles(n);
  const int parts = effective_parts(space.size(), exec.workers);
  std::vector<std::pair<std::uint64_t, std::string>> found(static_cast<std::size_t>(parts), {kNone, {}});
  std::atomic<std::uint64_t> best{kNone};
  parallel_ranges(space.size(), exec.workers, [&](int part, IndexRange range) {
    space.for_each(range.begin, range.end, [&](std::uint64_t r, const Profile& p) {
      if (r > best.load(std::memory_order_relaxed)) return false;
      if (auto msg = pred(p)) {
        found[static_cast<std::size_t>(part)] = {r, *msg};
        std::uint64_t cur = best.load();
        while (r < cur && !best.compare_exchange_weak(cur, r)) {
        }
        return false;
      }
      return true;
    });
  });
  for (auto& [r, msg] : found)
    if (r != kNone) return msg;
  return std::nullopt;
}

std::vector<Mechanism> ttc_family(int n) {
  std::vector<Mechanism> out;
  for (const Matching& mu : all_matchings(n)) out.push_back(Mechanism::ttc(Endowment(mu)));
  return out;
}

std::vector<Mechanism> sd_family(int n) {
  std::vector<Mechanism> out;
  for (const Matching& mu : all_matchings(n)) {
    std::vector<AgentId> order;
    for (ObjectId x : mu.assignment()) order.push_back(agent(index(x)));
    out.push_back(Mechanism::serial_dictatorship(order));
  }
  return out;
}

std::vector<Mechanism> tc3b_family() {
  std::vector<Mechanism> out;
  for (const Matching& mu : all_matchings(3)) out.push_back(Mechanism::tc3b(BrokerageProfile(mu)));
  return out;
}

bool rows_equal(const TallyMatrix& t, const std::vector<std::uint64_t>& expected) {
  for (int i = 0; i < t.n(); ++i)
    if (t.row(agent(i)) != expected) return false;
  return true;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!passed) detail << "; ";
      else detail.str("");
      passed = false;
      detail << what;
    }
  }
};

CriterionResult c1(ExecOptions exec) {
  Outcome o;
  for (const Mechanism& f : tc3b_family()) {
    const TallyMatrix t = balancedness_tally(f, 3, exec);
    o.require(t.total() == 216 && rows_equal(t, {144, 48, 24}),
              mech_text(f) + " agent 1 row " + row_text(t.row(agent(0))));
  }
  if (o.passed) o.detail << "6 brokerage profiles, every row (144,48,24) over 216 profiles";
  return {1, "three-broker tallies", o.passed, o.detail.str()};
}

CriterionResult c2(ExecOptions exec) {
  Outcome o;
  for (const Mechanism& f : ttc_family(3)) {
    const TallyMatrix t = balancedness_tally(f, 3, exec);
    o.require(is_balanced(t), mech_text(f) + " unbalanced at n=3");
  }
  std::string row4;
  for (const char* e : {"(a,b,c,d)", "(d,c,b,a)", "(b,c,d,a)"}) {
    const Mechanism f = Mechanism::ttc(Endowment(parse_matching(e)));
    const TallyMatrix t = balancedness_tally(f, 4, exec);
    o.require(t.total() == 331776 && is_balanced(t), mech_text(f) + " unbalanced at n=4");
    row4 = row_text(t.row(agent(0)));
  }
  if (o.passed) o.detail << "6 endowments at n=3, 3 at n=4 balanced; n=4 row " << row4;
  return {2, "TTC balancedness", o.passed, o.detail.str()};
}

CriterionResult c3(ExecOptions exec) {
  Outcome o;
  const Mechanism f = Mechanism::serial_dictatorship({agent(0), agent(1), agent(2)});
  const TallyMatrix t = balancedness_tally(f, 3, exec);
  o.require(t.row(agent(0)) == std::vector<std::uint64_t>{216, 0, 0}, "agent 1 row " + row_text(t.row(agent(0))));
  o.require(!is_balanced(t), "tally reported balanced");
  if (o.passed)
    o.detail << "rows " << row_text(t.row(agent(0))) << " " << row_text(t.row(agent(1))) << " "
             << row_text(t.row(agent(2)));
  return {3, "serial dictatorship imbalance", o.passed, o.detail.str()};
}

CriterionResult c4(ExecOptions exec) {
  Outcome o;
  const Mechanism psi = Mechanism::psi_example();
  const CheckOptions opts{Mode::exhaustive, 0, 0, exec.workers};
  o.require(!check_efficiency(psi, 3, opts), "psi reported inefficient");
  o.require(is_balanced(balancedness_tally(psi, 3, exec)), "psi tally unbalanced");
  const auto w = check_group_strategy_proof(psi, 3, opts);
  if (!w) {
    o.require(false, "no coalition manipulation found for psi");
  } else {
    const auto& m = std::get<Manipulation>(w->detail);
    const bool shape = m.coalition == std::vector<AgentId>{agent(1)} && w->profile == psi_profile_hat() &&
                       format_preference(m.misreport[agent(1)]) == "a>b>c";
    o.require(shape, "psi witness coalition/profile differs: " + format_profile(w->profile));
    o.require(replay_witness(*w, psi), "psi witness does not replay");
  }
  int gsp = 0;
  std::vector<Mechanism> family = ttc_family(3);
  for (auto& f : sd_family(3)) family.push_back(f);
  for (auto& f : tc3b_family()) family.push_back(f);
  for (const Mechanism& f : family) {
    const auto v = check_group_strategy_proof(f, 3, opts);
    o.require(!v, mech_text(f) + " manipulable at " + (v ? format_profile(v->profile) : ""));
    if (!v) ++gsp;
  }
  if (o.passed)
    o.detail << "psi efficient and balanced; coalition {2} gains at " << format_profile(psi_profile_hat())
             << " by reporting a>b>c; " << gsp << " TTC/SD/TC3B mechanisms group strategy-proof";
  return {4, "psi counterexample battery", o.passed, o.detail.str()};
}

CriterionResult c5(ExecOptions exec) {
  Outcome o;
  Rights initial(3);
  initial.set(object(0), {agent(0), RightKind::owner});
  initial.set(object(1), {agent(0), RightKind::owner});
  initial.set(object(2), {agent(1), RightKind::owner});
  const Mechanism f = Mechanism::owner_broker(make_persistent_table(initial));
  const TallyMatrix t = balancedness_tally(f, 3, exec);
  o.require(t.count(agent(0), Rank{3}) == 0, "multi-owner bottom count " + std::to_string(t.count(agent(0), Rank{3})));
  bool other = false;
  for (int i = 1; i < 3; ++i) other = other || t.count(agent(i), Rank{3}) > 0;
  o.require(other, "no other agent ever receives a bottom choice");
  o.require(!is_balanced(t), "tally reported balanced");
  if (o.passed)
    o.detail << "rows " << row_text(t.row(agent(0))) << " " << row_text(t.row(agent(1))) << " "
             << row_text(t.row(agent(2)));
  return {5, "two-object owner imbalance", o.passed, o.detail.str()};
}

CriterionResult c6(ExecOptions exec) {
  Outcome o;
  for (int n : {3, 4}) {
    const Mechanism f = Mechanism::owner_broker(make_one_broker_table(agent(0), Endowment::identity(n)));
    const TallyMatrix t = balancedness_tally(f, n, exec);
    o.require(!is_balanced(t), "one-broker tally balanced at n=" + std::to_string(n));
    const TopSetInclusion inc = check_top_set_inclusion(agent(0), n, exec);
    o.require(inc.passed(), "top-set inclusion fails at n=" + std::to_string(n));
    std::uint64_t best_owner = 0;
    for (int i = 1; i < n; ++i) best_owner = std::max(best_owner, t.count(agent(i), Rank{1}));
    o.require(t.count(agent(0), Rank{1}) < best_owner, "broker top count not below owners at n=" + std::to_string(n));
    if (o.passed)
      o.detail << (n == 3 ? "" : "; ") << "n=" << n << ": broker top " << t.count(agent(0), Rank{1}) << " < owner top "
               << best_owner << ", top sets " << inc.broker_mechanism_top << " < " << inc.ttc_top;
  }
  return {6, "one-broker scenario", o.passed, o.detail.str()};
}

CriterionResult c7(ExecOptions exec) {
  Outcome o;
  std::vector<Mechanism> family;
  for (const char* e : {"(a,b,c)", "(b,c,a)", "(c,a,b)"}) family.push_back(Mechanism::ttc(Endowment(parse_matching(e))));
  family.push_back(Mechanism::serial_dictatorship({agent(0), agent(1), agent(2)}));
  family.push_back(Mechanism::serial_dictatorship({agent(2), agent(0), agent(1)}));
  family.push_back(Mechanism::tc3b(BrokerageProfile::identity()));
  family.push_back(Mechanism::tc3b(BrokerageProfile(parse_matching("(b,c,a)"))));
  int pairs = 0;
  std::vector<std::uint64_t> sums;
  for (std::size_t a = 0; a < family.size(); ++a)
    for (std::size_t b = a + 1; b < family.size(); ++b) {
      const RankSumComparison c = check_rank_sum_equality(family[a], family[b], 3, exec);
      o.require(c.equal(), mech_text(family[a]) + " vs " + mech_text(family[b]) + " differ");
      o.require(c.f_sums[0] == 432 && c.g_sums[0] == 432, "top-rank sum " + std::to_string(c.f_sums[0]));
      sums = c.f_sums;
      ++pairs;
    }
  if (o.passed) o.detail << pairs << " pairs, column sums " << row_text(sums);
  return {7, "rank-sum identities", o.passed, o.detail.str()};
}

CriterionResult c8(ExecOptions exec) {
  Outcome o;
  const Mechanism t = Mechanism::ttc(Endowment::identity(3));
  const Mechanism sd = Mechanism::serial_dictatorship({agent(0), agent(1), agent(2)});
  const Mechanism b = Mechanism::tc3b(BrokerageProfile::identity());
  if (auto p = check_symmetrization_equiv(t, sd, 3, exec)) o.require(false, "TTC vs SD differ at " + format_profile(*p));
  if (auto p = check_symmetrization_equiv(t, b, 3, exec)) o.require(false, "TTC vs TC3B differ at " + format_profile(*p));
  if (o.passed) o.detail << "(TTC, SD) and (TTC, TC3B) agree on all 216 profiles x 6 permutations";
  return {8, "symmetrization equivalence", o.passed, o.detail.str()};
}

CriterionResult c9(ExecOptions exec) {
  Outcome o;
  if (auto f = tau_swap_property(3, exec)) o.require(false, "swap: " + *f);
  if (auto f = pi_relabel_property(exec)) o.require(false, "relabel: " + *f);
  if (auto f = cycle_order_property(3, 100, exec)) o.require(false, "cycle order: " + *f);
  for (const Matching& mu : all_matchings(3))
    if (auto f = ttc_table_property(Endowment(mu), 0, 0, exec)) o.require(false, "ttc table n=3: " + *f);
  if (auto f = ttc_table_property(Endowment::identity(4), 100000, 7, exec)) o.require(false, "ttc table n=4: " + *f);
  if (o.passed) o.detail << "swap, relabel, cycle-order (100 orders) and TTC-table suites hold";
  return {9, "property suites", o.passed, o.detail.str()};
}

CriterionResult c10(ExecOptions exec) {
  Outcome o;
  const Mechanism f = Mechanism::ttc(Endowment::identity(5));
  constexpr std::uint64_t samples = 1000000, seed = 20240601;
  const MonteCarloTally a = monte_carlo_tally(f, 5, samples, seed, exec);
  const MonteCarloTally b = monte_carlo_tally(f, 5, samples, seed, ExecOptions{exec.workers == 3 ? 2 : 3});
  const double d = a.max_top_discrepancy();
  o.require(d < 0.005, "top-choice discrepancy " + std::to_string(d));
  o.require(a.counts == b.counts, "tallies differ across worker counts");
  if (o.passed) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu samples, max top-choice discrepancy %.5f, reproducible across worker counts",
                  static_cast<unsigned long long>(samples), d);
    o.detail << buf;
  }
  return {10, "Monte Carlo sanity at n=5", o.passed, o.detail.str()};
}

}  // namespace

std::optional<std::string> tau_swap_property(int n, ExecOptions exec) {
  const auto omegas = all_matchings(n);
  return first_failure(n, exec, [&](const Profile& p) -> std::optional<std::string> {
    for (const Matching& mu : omegas) {
      const Endowment omega(mu);
      const Matching at_r = ttc(omega, p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const Profile tau = swap_objects_in_profile(p, omega.of(agent(i)), omega.of(agent(j)), agent(i), agent(j));
          const Matching at_tau = ttc(omega, tau);
          if (rank_of(p.of(i), at_r.of(i)) != rank_of(tau.of(j), at_tau.of(j)) ||
              rank_of(p.of(j), at_r.of(j)) != rank_of(tau.of(i), at_tau.of(i)))
            return "endowment " + format_matching(mu) + ", agents " + std::to_string(i + 1) + "," +
                   std::to_string(j + 1) + ", profile " + format_profile(p);
        }
    }
    return std::nullopt;
  });
}

std::optional<std::string> pi_relabel_property(ExecOptions exec) {
  const auto brokerages = all_matchings(3);
  return first_failure(3, exec, [&](const Profile& p) -> std::optional<std::string> {
    for (const Matching& b : brokerages)
      for (const Matching& c : brokerages) {
        std::vector<int> image(3);
        for (int i = 0; i < 3; ++i) image[static_cast<std::size_t>(index(c.of(i)))] = index(b.of(i));
        const Permutation pi = Permutation::from_images(image);
        const Matching lhs = tc_three_brokers(BrokerageProfile(c), relabel_objects(p, pi));
        const Matching rhs = relabel(tc_three_brokers(BrokerageProfile(b), p), pi.inverse());
        if (lhs != rhs)
          return "brokerages " + format_matching(b) + "," + format_matching(c) + ", profile " + format_profile(p);
      }
    return std::nullopt;
  });
}

std::optional<std::string> cycle_order_property(int n, int seeds, ExecOptions exec) {
  const auto omegas = all_matchings(n);
  return first_failure(n, exec, [&](const Profile& p) -> std::optional<std::string> {
    for (const Matching& mu : omegas) {
      const Endowment omega(mu);
      const Matching canonical = ttc(omega, p);
      for (int s = 0; s < seeds; ++s) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(s));
        if (ttc_random_cycle_order(omega, p, rng) != canonical)
          return "endowment " + format_matching(mu) + ", seed " + std::to_string(s) + ", profile " + format_profile(p);
      }
    }
    return std::nullopt;
  });
}

std::optional<std::string> ttc_table_property(const Endowment& omega, std::uint64_t samples, std::uint64_t seed,
                                              ExecOptions exec) {
  const InheritanceTable table = make_ttc_table(omega);
  auto check = [&](const Profile& p) -> std::optional<std::string> {
    if (owner_broker_tc(table, p) != ttc(omega, p))
      return "endowment " + format_matching(omega.as_matching()) + ", profile " + format_profile(p);
    return std::nullopt;
  };
  const int n = omega.size();
  if (samples == 0) return first_failure(n, exec, check);

  const std::uint64_t blocks = block_count(samples);
  const int parts = effective_parts(blocks, exec.workers);
  std::vector<std::optional<std::string>> found(static_cast<std::size_t>(parts));
  parallel_ranges(blocks, exec.workers, [&](int part, IndexRange range) {
    for_each_sample(samples, seed, range.begin, range.end, [&](std::uint64_t, std::mt19937_64& rng) {
      if (auto msg = check(random_profile(n, rng))) {
        found[static_cast<std::size_t>(part)] = msg;
        return false;
      }
      return true;
    });
  });
  for (auto& f : found)
    if (f) return f;
  return std::nullopt;
}

CriterionResult run_criterion(int id, ExecOptions exec) {
  static constexpr CriterionResult (*table[])(ExecOptions) = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  if (id < 1 || id > 10) throw InvalidInput("criterion id must be 1..10");
  try {
    return table[id - 1](exec);
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
  }
}

std::vector<CriterionResult> run_reproduction(ExecOptions exec) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) out.push_back(run_criterion(id, exec));
  return out;
}

std::string format_results(const std::vector<CriterionResult>& results) {
  std::ostringstream out;
  for (const auto& r : results)
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << ": " << r.detail << '\n';
  return out.str();
}

}  // namespace balmatch
