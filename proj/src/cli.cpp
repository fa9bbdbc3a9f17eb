#include "balmatch/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "balmatch/codec.hpp"
#include "balmatch/io.hpp"
#include "balmatch/parallel.hpp"
#include "balmatch/repro.hpp"

namespace balmatch {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands = {"tally",     "check-efficient", "check-sp",       "check-gsp",  "equiv-sym",
                                            "rank-sums", "lemma4",          "validate-table", "paper-repro"};

Mechanism require_mechanism(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required for this command");
  return load_mechanism(path);
}

int resolve_n(const RunConfig& c, const Mechanism& f) {
  const int n = c.n.value_or(f.size());
  if (n != f.size())
    throw UsageError("--n " + std::to_string(n) + " does not match the mechanism size " + std::to_string(f.size()));
  return n;
}

Mode resolve_mode(const RunConfig& c, bool sample_allowed) {
  if (c.mode == "exhaustive") return Mode::exhaustive;
  if (c.mode != "sample") throw UsageError("--mode must be exhaustive or sample");
  if (!sample_allowed) throw UsageError(c.command + " supports exhaustive mode only");
  if (c.samples == 0) throw UsageError("sample mode requires --samples >= 1");
  return Mode::sample;
}

json base_report(const RunConfig& c, const Mechanism* f, int n, Mode mode) {
  json r = report_header(c.command);
  if (f) r["mechanism"] = mechanism_to_json(*f);
  r["n"] = n;
  r["mode"] = mode == Mode::exhaustive ? "exhaustive" : "sample";
  if (mode == Mode::sample) {
    r["samples"] = c.samples;
    r["seed"] = c.seed;
  }
  return r;
}

json distribution_to_json(const MatchingDistribution& d) {
  json out = json::object();
  for (const auto& [mu, w] : d.numerators) out[format_matching(mu)] = std::to_string(w) + "/" + std::to_string(d.denominator);
  return out;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + c.out);
  file << text;
}

int finish(const RunConfig& c, const json& report, bool violation, std::ostream& out) {
  emit(c, dump_report(report), out);
  return violation ? kExitViolation : kExitPass;
}

int cmd_tally(const RunConfig& c, std::ostream& out) {
  const Mechanism f = require_mechanism(c.mech, "--mech");
  const int n = resolve_n(c, f);
  const Mode mode = resolve_mode(c, true);
  json r = base_report(c, &f, n, mode);
  if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");

  if (mode == Mode::exhaustive) {
    const TallyMatrix t = balancedness_tally(f, n, {c.workers});
    const auto w = imbalance_witness(t);
    if (c.format == "csv") {
      emit(c, tally_to_csv(t), out);
      return w ? kExitViolation : kExitPass;
    }
    r["total"] = t.total();
    r["tally"] = tally_to_json(t);
    r["balanced"] = !w;
    if (w) r["witness"] = witness_to_json(*w);
    return finish(c, r, w.has_value(), out);
  }

  // Sampled tallies are report-only: balancedness is an exact property.
  const MonteCarloTally mc = monte_carlo_tally(f, n, c.samples, c.seed, {c.workers});
  if (c.format == "csv") {
    emit(c, tally_to_csv(mc.counts), out);
    return kExitPass;
  }
  json freq = json::array(), se = json::array();
  for (int i = 0; i < n; ++i) {
    json fr = json::array(), er = json::array();
    for (int k = 1; k <= n; ++k) {
      fr.push_back(mc.frequency(agent(i), Rank{k}));
      er.push_back(mc.standard_error(agent(i), Rank{k}));
    }
    freq.push_back(fr);
    se.push_back(er);
  }
  r["total"] = mc.counts.total();
  r["tally"] = tally_to_json(mc.counts);
  r["frequencies"] = freq;
  r["standard_errors"] = se;
  r["max_top_discrepancy"] = mc.max_top_discrepancy();
  r["balanced"] = nullptr;
  r["note"] = "sampled tallies are report-only; balancedness is decided exhaustively";
  return finish(c, r, false, out);
}

int cmd_axiom(const RunConfig& c, std::ostream& out) {
  const Mechanism f = require_mechanism(c.mech, "--mech");
  const int n = resolve_n(c, f);
  const Mode mode = resolve_mode(c, true);
  const CheckOptions opts{mode, c.samples, c.seed, c.workers};
  std::optional<AxiomWitness> w;
  if (c.command == "check-efficient")
    w = check_efficiency(f, n, opts);
  else if (c.command == "check-sp")
    w = check_strategy_proof(f, n, opts);
  else
    w = check_group_strategy_proof(f, n, opts);
  json r = base_report(c, &f, n, mode);
  r["holds"] = !w;
  if (w) r["witness"] = witness_to_json(*w);
  return finish(c, r, w.has_value(), out);
}

int cmd_equiv(const RunConfig& c, std::ostream& out) {
  const Mechanism f = require_mechanism(c.mech, "--mech");
  const Mechanism g = require_mechanism(c.mech2, "--mech2");
  const int n = resolve_n(c, f);
  resolve_n(c, g);
  if (g.size() != n) throw UsageError("mechanisms have different sizes");
  resolve_mode(c, false);
  json r = base_report(c, &f, n, Mode::exhaustive);
  r["mechanism2"] = mechanism_to_json(g);
  const auto p = check_symmetrization_equiv(f, g, n, {c.workers});
  r["equivalent"] = !p;
  if (p) {
    r["counterexample"] = {{"profile", format_profile(*p)},
                           {"distribution", distribution_to_json(symmetrized_distribution(f, *p))},
                           {"distribution2", distribution_to_json(symmetrized_distribution(g, *p))}};
  }
  return finish(c, r, p.has_value(), out);
}

int cmd_rank_sums(const RunConfig& c, std::ostream& out) {
  const Mechanism f = require_mechanism(c.mech, "--mech");
  const Mechanism g = require_mechanism(c.mech2, "--mech2");
  const int n = resolve_n(c, f);
  resolve_n(c, g);
  resolve_mode(c, false);
  const RankSumComparison cmp = check_rank_sum_equality(f, g, n, {c.workers});
  json r = base_report(c, &f, n, Mode::exhaustive);
  r["mechanism2"] = mechanism_to_json(g);
  r["sums"] = cmp.f_sums;
  r["sums2"] = cmp.g_sums;
  r["equal"] = cmp.equal();
  if (cmp.first_mismatch) r["first_mismatch_rank"] = cmp.first_mismatch->value;
  return finish(c, r, !cmp.equal(), out);
}

int cmd_lemma4(const RunConfig& c, std::ostream& out) {
  if (!c.n) throw UsageError("--n is required for lemma4");
  const int n = *c.n;
  resolve_mode(c, false);
  if (c.agent < 1 || c.agent > n) throw UsageError("--agent must be between 1 and n");
  const AgentId i = agent(c.agent - 1);
  const TopSetInclusion t = check_top_set_inclusion(i, n, {c.workers});
  json r = base_report(c, nullptr, n, Mode::exhaustive);
  r["broker"] = c.agent;
  r["endowment"] = format_matching(Matching::identity(n));
  r["broker_mechanism_top"] = t.broker_mechanism_top;
  r["ttc_top"] = t.ttc_top;
  r["subset_holds"] = !t.subset_counterexample;
  if (t.subset_counterexample) r["subset_counterexample"] = format_profile(*t.subset_counterexample);
  r["strictness_profile"] = format_profile(t.strictness_profile);
  r["strictness_witnessed"] = t.strictness_witnessed;
  r["passed"] = t.passed();
  return finish(c, r, !t.passed(), out);
}

int cmd_validate_table(const RunConfig& c, std::ostream& out) {
  if (c.mech.empty()) throw UsageError("--mech (table file or owner_broker config) is required");
  const json j = read_json_file(c.mech);
  std::optional<InheritanceTable> table;
  json r = report_header(c.command);
  if (j.is_object() && j.contains("kind")) {
    const Mechanism f = mechanism_from_json(j, std::filesystem::path(c.mech).parent_path(), c.mech);
    const auto* ob = std::get_if<Mechanism::OwnerBroker>(&f.kind());
    if (!ob) throw UsageError("validate-table needs an owner_broker config or a table file");
    table = *ob->table;
    r["mechanism"] = mechanism_to_json(f);
  } else {
    table = table_from_json(j, c.n.value_or(0), c.mech);
    r["table"] = table_to_json(*table);
  }
  if (c.n && *c.n != table->size()) throw UsageError("--n does not match the table size");
  const ValidationReport v = validate_inheritance_table(*table);
  r["n"] = table->size();
  r["valid"] = v.ok();
  json list = json::array();
  for (const auto& t : v.violations) list.push_back(violation_to_json(t));
  r["violations"] = list;
  return finish(c, r, !v.ok(), out);
}

int cmd_repro(const RunConfig& c, std::ostream& out) {
  const auto results = run_reproduction({c.workers});
  bool all = true;
  json rows = json::array();
  for (const auto& res : results) {
    all = all && res.passed;
    rows.push_back({{"id", res.id}, {"title", res.title}, {"passed", res.passed}, {"detail", res.detail}});
  }
  out << format_results(results);
  if (!c.out.empty()) {
    json r = report_header(c.command);
    r["criteria"] = rows;
    r["passed"] = all;
    emit(c, dump_report(r), out);
  }
  return all ? kExitPass : kExitViolation;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.workers < 1) throw UsageError("--workers must be >= 1");
    if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
    if (c.format == "csv" && c.command != "tally") throw UsageError("--format csv is only available for tally");
    if (c.command == "tally") return cmd_tally(c, out);
    if (c.command == "check-efficient" || c.command == "check-sp" || c.command == "check-gsp") return cmd_axiom(c, out);
    if (c.command == "equiv-sym") return cmd_equiv(c, out);
    if (c.command == "rank-sums") return cmd_rank_sums(c, out);
    if (c.command == "lemma4") return cmd_lemma4(c, out);
    if (c.command == "validate-table") return cmd_validate_table(c, out);
    if (c.command == "paper-repro") return cmd_repro(c, out);
    throw UsageError("unknown command \"" + c.command + "\"");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ExhaustionLimitExceeded& e) {
    err << "refused: " << e.what() << '\n';
  } catch (const MalformedTable& e) {
    err << "malformed table: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
  }
  return kExitUsage;
}

int run_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"House-allocation mechanisms and exhaustive axiom verification"};
  RunConfig c;
  c.workers = default_workers();
  int n = 0;
  app.add_option("command", c.command, "Subcommand")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--mech", c.mech, "Mechanism config (JSON); table file for validate-table");
  app.add_option("--mech2", c.mech2, "Second mechanism config for equiv-sym and rank-sums");
  auto* n_opt = app.add_option("--n", n, "Number of agents")->check(CLI::Range(1, kMaxSize));
  app.add_option("--mode", c.mode, "exhaustive or sample")->check(CLI::IsMember({"exhaustive", "sample"}));
  app.add_option("--samples", c.samples, "Sample count for sample mode");
  app.add_option("--seed", c.seed, "Sampling seed");
  app.add_option("--workers", c.workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Report file (default: stdout)");
  app.add_option("--format", c.format, "json or csv (tally only)")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--agent", c.agent, "lemma4: the broker agent (1-based)");
  app.footer(
      "Commands: tally, check-efficient, check-sp, check-gsp, equiv-sym, rank-sums, lemma4 (one-broker top-choice "
      "set inclusion), validate-table, paper-repro (reproduction battery).\n"
      "Exit status: 0 pass, 1 violation found, 2 usage or config error.\n"
      "BALMATCH_EXHAUSTION_LIMIT raises the exhaustive-enumeration cap (default n=4).");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  if (*n_opt) c.n = n;
  return run(c, out, err);
}

}  // namespace balmatch
