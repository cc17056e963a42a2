#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shipdrill/errors.hpp"
#include "shipdrill/fire.hpp"
#include "shipdrill/layout.hpp"

namespace shipdrill {

struct Scenario {
  std::string id;
  std::string title;
  ShipLayout layout;
  FireSpec fire;
  bool guidance_enabled = false;
  std::string trainee_start;
  std::optional<double> time_limit_s;

  bool operator==(const Scenario&) const = default;
};

/// Strict parse of the scenario JSON document. Unknown keys are rejected at
/// every level.
///
/// Throws ParseError for malformed JSON, SchemaError for missing, mistyped or
/// out-of-range fields (including an empty document) and ReferenceError for
/// ids that do not resolve.
Scenario parse_scenario(std::string_view bytes);

/// Canonical document: fixed key order, two-space indent, trailing newline.
std::string serialize_scenario(const Scenario& scenario);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);

/// The four shipped levels, in order L1..L4.
const std::vector<Scenario>& builtin_levels();
const Scenario* find_builtin_level(std::string_view id);

// ---------------------------------------------------------------------------
// Validation

inline constexpr int kAlarmAudibleHops = 3;

enum class FindingSeverity { error, warning };
std::string_view to_string(FindingSeverity severity);

struct Finding {
  std::string rule;  // V1..V5, W1..W2
  FindingSeverity severity = FindingSeverity::error;
  std::string message;
  std::string citation;
  std::string subject;  // "layout", "compartment:<id>" or "passage:<from>-<to>"
  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Finding> findings;

  /// Distinct rule ids of error-severity findings, sorted.
  std::vector<std::string> error_rules() const;
};

/// Runs the regulation-derived checks:
///   V1 alarm call points exist and every compartment is within
///      kAlarmAudibleHops of one
///   V2 every compartment has a signed path to a muster area (and the plan
///      is one connected graph)
///   V3 every galley and engine room holds an extinguisher
///   V4 some shortest escape route from each compartment is fully signed;
///      reported once per offending passage. Compartments already failing V2
///      are left to V2.
///   V5 an emergency phone is reachable from the trainee's start
/// plus style warnings W1 (unnamed compartment) and W2 (fire outside the
/// galley or engine room).
ValidationReport validate_scenario(const Scenario& scenario);

/// One JSON object per finding, newline terminated:
/// {"rule","severity","message","citation","subject"}.
std::string findings_to_jsonl(const ValidationReport& report);

class ScenarioInvalid : public Error {
 public:
  explicit ScenarioInvalid(ValidationReport report)
      : Error("scenario failed validation"), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace shipdrill
