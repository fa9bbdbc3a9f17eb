#include "balmatch/io.hpp"

#include <fstream>
#include <sstream>

#include "balmatch/codec.hpp"

namespace balmatch {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& where, const std::string& what) {
  throw ConfigError(origin + ": " + (where.empty() ? "/" : where) + ": " + what);
}

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// Runs a codec parse and rethrows its error with the JSON location.
template <class Fn>
auto located(const std::string& origin, const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    fail(origin, where, e.what());
  }
}

const json& require_key(const json& j, const char* key, const std::string& origin, const std::string& where) {
  if (!j.is_object()) fail(origin, where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(origin, where, std::string("missing key \"") + key + "\"");
  return *it;
}

const json& require_array(const json& j, const char* key, const std::string& origin, const std::string& where) {
  const json& a = require_key(j, key, origin, where);
  if (!a.is_array()) fail(origin, where + "/" + key, "expected an array");
  return a;
}

ObjectId json_object(const json& j, const std::string& origin, const std::string& where) {
  if (!j.is_string()) fail(origin, where, "expected an object letter");
  return located(origin, where, [&] { return parse_object(j.get<std::string>()); });
}

AgentId json_agent(const json& j, const std::string& origin, const std::string& where) {
  if (!j.is_number_integer()) fail(origin, where, "expected a 1-based agent number");
  const auto v = j.get<long long>();
  if (v < 1 || v > kMaxSize) fail(origin, where, "agent " + std::to_string(v) + " out of range");
  return agent(static_cast<int>(v - 1));
}

Matching json_matching(const json& a, const std::string& origin, const std::string& where) {
  std::vector<ObjectId> objects;
  for (std::size_t k = 0; k < a.size(); ++k) objects.push_back(json_object(a[k], origin, where + "/" + std::to_string(k)));
  return located(origin, where, [&] { return Matching::from_assignment(objects); });
}

Rights json_rights(const json& j, int n, const std::string& origin, const std::string& where) {
  if (!j.is_object()) fail(origin, where, "expected an object mapping objects to control rights");
  Rights r(n);
  for (const auto& [name, right] : j.items()) {
    const std::string at = where + "/" + escape_pointer(name);
    const ObjectId x = located(origin, at, [&] { return parse_object(name); });
    if (index(x) >= n) fail(origin, at, "object " + name + " outside an instance with n=" + std::to_string(n));
    const AgentId i = json_agent(require_key(right, "agent", origin, at), origin, at + "/agent");
    if (index(i) >= n) fail(origin, at + "/agent", "agent outside an instance with n=" + std::to_string(n));
    const json& kind = require_key(right, "kind", origin, at);
    RightKind k;
    if (kind == "owner")
      k = RightKind::owner;
    else if (kind == "broker")
      k = RightKind::broker;
    else
      fail(origin, at + "/kind", "expected \"owner\" or \"broker\"");
    r.set(x, ControlRight{i, k});
  }
  return r;
}

void check_n(const json& j, int inferred, const std::string& origin) {
  auto it = j.find("n");
  if (it == j.end()) return;
  if (!it->is_number_integer()) fail(origin, "/n", "expected an integer");
  if (it->get<long long>() != inferred)
    fail(origin, "/n", "n=" + std::to_string(it->get<long long>()) + " disagrees with the parameters (n=" +
                           std::to_string(inferred) + ")");
}

json object_list(std::span<const ObjectId> objects) {
  json a = json::array();
  for (ObjectId x : objects) a.push_back(object_name(x));
  return a;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

InheritanceTable table_from_json(const json& j, int n, const std::string& origin) {
  if (!j.is_object()) fail(origin, "", "expected an object keyed by submatching");
  if (n <= 0) {
    auto it = j.find("n");
    if (it != j.end() && it->is_number_integer()) {
      n = it->get<int>();
    } else {
      auto root = j.find("");
      if (root == j.end() || !root->is_object()) fail(origin, "", "cannot infer n: no \"n\" and no \"\" entry");
      n = static_cast<int>(root->size());
    }
  }
  located(origin, "", [&] {
    require_size(n);
    return 0;
  });
  std::map<Submatching, Rights> entries;
  for (const auto& [key, rights] : j.items()) {
    if (key == "n") continue;
    const std::string at = "/" + escape_pointer(key);
    const Submatching nu = located(origin, at, [&] { return parse_submatching(n, key); });
    if (!entries.emplace(nu, json_rights(rights, n, origin, at)).second)
      fail(origin, at, "duplicate entry for submatching \"" + nu.key() + "\"");
  }
  return InheritanceTable::from_entries(n, std::move(entries));
}

InheritanceTable load_table(const std::filesystem::path& path, int n) {
  return table_from_json(read_json_file(path), n, path.string());
}

json rights_to_json(const Rights& rights) {
  json out = json::object();
  for (int x = 0; x < rights.size(); ++x) {
    if (const auto& r = rights.at(object(x)))
      out[object_name(object(x))] = {{"agent", index(r->agent) + 1},
                                     {"kind", r->kind == RightKind::owner ? "owner" : "broker"}};
  }
  return out;
}

json table_to_json(const InheritanceTable& table) {
  const InheritanceTable explicit_table = table.generated() ? materialize(table) : table;
  json out = json::object();
  for (const auto& [nu, rights] : explicit_table.entries()) out[nu.key()] = rights_to_json(rights);
  return out;
}

Mechanism mechanism_from_json(const json& j, const std::filesystem::path& base_dir, const std::string& origin) {
  const json& kind_j = require_key(j, "kind", origin, "");
  if (!kind_j.is_string()) fail(origin, "/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();

  if (kind == "ttc") {
    const Matching mu = json_matching(require_array(j, "endowment", origin, ""), origin, "/endowment");
    check_n(j, mu.size(), origin);
    return Mechanism::ttc(Endowment(mu));
  }
  if (kind == "tc3b") {
    const Matching mu = json_matching(require_array(j, "brokerage", origin, ""), origin, "/brokerage");
    check_n(j, mu.size(), origin);
    return located(origin, "/brokerage", [&] { return Mechanism::tc3b(BrokerageProfile(mu)); });
  }
  if (kind == "serial_dictatorship") {
    const json& a = require_array(j, "order", origin, "");
    std::vector<AgentId> order;
    for (std::size_t k = 0; k < a.size(); ++k) order.push_back(json_agent(a[k], origin, "/order/" + std::to_string(k)));
    check_n(j, static_cast<int>(order.size()), origin);
    return located(origin, "/order", [&] { return Mechanism::serial_dictatorship(order); });
  }
  if (kind == "constant") {
    const Matching mu = json_matching(require_array(j, "matching", origin, ""), origin, "/matching");
    check_n(j, mu.size(), origin);
    return Mechanism::constant(mu);
  }
  if (kind == "psi_example") {
    check_n(j, 3, origin);
    return Mechanism::psi_example();
  }
  if (kind == "owner_broker") {
    int n = 0;
    if (auto it = j.find("n"); it != j.end()) {
      if (!it->is_number_integer()) fail(origin, "/n", "expected an integer");
      n = it->get<int>();
    }
    const int sources = static_cast<int>(j.contains("table_file")) + static_cast<int>(j.contains("table")) +
                        static_cast<int>(j.contains("initial_rights"));
    if (sources != 1) fail(origin, "", "owner_broker needs exactly one of \"table_file\", \"table\", \"initial_rights\"");
    InheritanceTable table = [&] {
      if (auto it = j.find("table_file"); it != j.end()) {
        if (!it->is_string()) fail(origin, "/table_file", "expected a path");
        std::filesystem::path p = it->get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return load_table(p, n);
      }
      if (auto it = j.find("table"); it != j.end()) return table_from_json(*it, n, origin + " /table");
      const json& init = j.at("initial_rights");
      if (!init.is_object()) fail(origin, "/initial_rights", "expected an object");
      const int size = n > 0 ? n : static_cast<int>(init.size());
      located(origin, "/initial_rights", [&] {
        require_size(size);
        return 0;
      });
      const Rights r = json_rights(init, size, origin, "/initial_rights");
      return located(origin, "/initial_rights", [&] { return make_persistent_table(r); });
    }();
    check_n(j, table.size(), origin);
    return Mechanism::owner_broker(std::move(table));
  }
  fail(origin, "/kind", "unknown mechanism kind \"" + kind + "\"");
}

Mechanism load_mechanism(const std::filesystem::path& path) {
  return mechanism_from_json(read_json_file(path), path.parent_path(), path.string());
}

json mechanism_to_json(const Mechanism& f) {
  json out{{"kind", f.name()}, {"n", f.size()}};
  struct Visitor {
    json& out;
    void operator()(const Mechanism::SerialDictatorship& m) const {
      json a = json::array();
      for (AgentId i : m.order) a.push_back(index(i) + 1);
      out["order"] = a;
    }
    void operator()(const Mechanism::Ttc& m) const { out["endowment"] = object_list(m.endowment.as_matching().assignment()); }
    void operator()(const Mechanism::Tc3b& m) const { out["brokerage"] = object_list(m.brokerage.as_matching().assignment()); }
    void operator()(const Mechanism::OwnerBroker& m) const { out["table"] = table_to_json(*m.table); }
    void operator()(const Mechanism::Constant& m) const { out["matching"] = object_list(m.matching.assignment()); }
    void operator()(const Mechanism::PsiExample&) const {}
  };
  std::visit(Visitor{out}, f.kind());
  return out;
}

json tally_to_json(const TallyMatrix& t) {
  json rows = json::array();
  for (int i = 0; i < t.n(); ++i) rows.push_back(t.row(agent(i)));
  return rows;
}

std::string tally_to_csv(const TallyMatrix& t) {
  std::ostringstream out;
  out << "agent";
  for (int r = 1; r <= t.n(); ++r) out << ",rank" << r;
  out << '\n';
  for (int i = 0; i < t.n(); ++i) {
    out << i + 1;
    for (auto c : t.row(agent(i))) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

json witness_to_json(const AxiomWitness& w) {
  json out{{"kind", to_string(w.kind)}};
  if (const auto* d = std::get_if<Inefficiency>(&w.detail)) {
    out["profile"] = format_profile(w.profile);
    out["outcome"] = format_matching(d->outcome);
    out["dominating"] = format_matching(d->dominating);
  } else if (const auto* d = std::get_if<Manipulation>(&w.detail)) {
    out["profile"] = format_profile(w.profile);
    json coalition = json::array();
    json reports = json::object();
    for (AgentId i : d->coalition) {
      coalition.push_back(index(i) + 1);
      reports[agent_name(i)] = format_preference(d->misreport[i]);
    }
    out["coalition"] = coalition;
    out["coalition_reports"] = reports;
    out["misreport"] = format_profile(d->misreport);
    out["truthful"] = format_matching(d->truthful);
    out["manipulated"] = format_matching(d->manipulated);
  } else if (const auto* d = std::get_if<Imbalance>(&w.detail)) {
    out["agents"] = {index(d->first) + 1, index(d->second) + 1};
    out["rank"] = d->rank.value;
    out["counts"] = {d->first_count, d->second_count};
  }
  return out;
}

json violation_to_json(const TableViolation& v) {
  json out{{"kind", to_string(v.kind)}, {"at", v.at.key()}, {"message", v.message}};
  if (v.object) out["object"] = object_name(*v.object);
  if (v.agent) out["agent"] = index(*v.agent) + 1;
  return out;
}

json report_header(const std::string& command) {
  return json{{"schema", kReportSchema}, {"command", command}, {"rank_convention", kRankConvention}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace balmatch
