#pragma once

// JSON mechanism configs, inheritance-table files and report serialization.
//
// Mechanism config:
//   {"kind": "ttc", "n": 3, "endowment": ["a","b","c"]}
//   {"kind": "tc3b", "brokerage": ["a","b","c"]}
//   {"kind": "serial_dictatorship", "order": [1,2,3]}
//   {"kind": "owner_broker", "table_file": "table.json"}   relative to the config
//   {"kind": "owner_broker", "table": {...}}               inline table
//   {"kind": "owner_broker", "initial_rights": {"a": {"agent": 1, "kind": "owner"}, ...}}
//   {"kind": "constant", "matching": ["b","a","c"]}
//   {"kind": "psi_example"}
// "n" is optional when it can be inferred; if given it must agree.
//
// Table file: {"": {...rights at the empty submatching...}, "1:a": {...}, ...}
// where rights map object -> {"agent": <1-based>, "kind": "owner"|"broker"}.
// A table without "n" takes its size from the number of rights at "".

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "balmatch/inheritance.hpp"
#include "balmatch/mechanisms.hpp"
#include "balmatch/verify.hpp"

namespace balmatch {

/// Malformed config or table. The message carries a location: "file:line:col"
/// for syntax errors, "file: /json/pointer" for semantic errors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kReportSchema = 1;
inline constexpr const char* kRankConvention =
    "rank 1 = top choice; the bottom-up index k used in some texts is k = n + 1 - rank";

/// Parses JSON text, mapping syntax errors to ConfigError with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);
nlohmann::json read_json_file(const std::filesystem::path& path);

Mechanism mechanism_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                              const std::string& origin = "config");
Mechanism load_mechanism(const std::filesystem::path& path);
/// Canonical spec: keys sorted, "n" always present, generated tables
/// materialized over their reachable submatchings.
nlohmann::json mechanism_to_json(const Mechanism& f);

/// `n` <= 0 means infer from the "" entry.
InheritanceTable table_from_json(const nlohmann::json& j, int n = 0, const std::string& origin = "table");
InheritanceTable load_table(const std::filesystem::path& path, int n = 0);
nlohmann::json table_to_json(const InheritanceTable& table);
nlohmann::json rights_to_json(const Rights& rights);

nlohmann::json tally_to_json(const TallyMatrix& t);
/// One row per agent, columns rank 1..n.
std::string tally_to_csv(const TallyMatrix& t);
nlohmann::json witness_to_json(const AxiomWitness& w);
nlohmann::json violation_to_json(const TableViolation& v);

/// Report skeleton shared by every subcommand.
nlohmann::json report_header(const std::string& command);

/// Serialization used for report files: two-space indent, trailing newline.
std::string dump_report(const nlohmann::json& report);

}  // namespace balmatch
