#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "shipdrill/engine.hpp"
#include "shipdrill/protocol.hpp"

namespace shipdrill {

struct ScoreReport {
  std::string scenario_id;
  std::uint64_t total_ticks = 0;
  double total_time_s = 0.0;
  /// Seconds spent in each phase, keyed by phase name. Every phase is listed.
  std::map<std::string, double> per_phase_time_s;
  TaskChecklist checklist;
  std::vector<DrillError> errors;
  bool completed = false;

  bool operator==(const ScoreReport&) const = default;
};

/// Times come from the session's log alone; checklist and errors from its
/// state. Throws SessionStillOpen unless the session is finished or
/// `force_close` is set.
ScoreReport score_session(const DrillSession& session, bool force_close = false);

nlohmann::ordered_json checklist_to_json(const TaskChecklist& checklist);
nlohmann::ordered_json score_to_json(const ScoreReport& report);
/// Throws SchemaError.
ScoreReport score_from_json(const nlohmann::json& value);

// ---------------------------------------------------------------------------
// Cohort analytics

enum class Experience { Low, Medium, High };
std::string_view to_string(Experience level);
std::optional<Experience> parse_experience(std::string_view text);

struct TesterProfile {
  std::string tester_id;
  Experience exp_fire_drills = Experience::Low;
  Experience exp_vr = Experience::Low;
  Experience exp_games = Experience::Low;
  bool operator==(const TesterProfile&) const = default;
};

enum class GamerGroup { experienced_gamers, non_experienced_gamers };
std::string_view to_string(GamerGroup group);

/// Only High video-game experience counts as an experienced gamer.
GamerGroup gamer_group(const TesterProfile& profile);

/// Orders embedded digit runs numerically, so "2" < "10".
struct NaturalLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

struct TesterLevel {
  std::string tester;
  std::string level;
};
struct TesterLevelLess {
  bool operator()(const TesterLevel& a, const TesterLevel& b) const;
};

struct GroupLevel {
  GamerGroup group;
  std::string level;
};
struct GroupLevelLess {
  bool operator()(const GroupLevel& a, const GroupLevel& b) const;
};

struct GroupSummary {
  double max_delta_s = 0.0;
  double mean_delta_s = 0.0;
  std::size_t count = 0;
  bool operator==(const GroupSummary&) const = default;
};

struct CohortEntry {
  TesterProfile profile;
  std::string level;
  double time_s = 0.0;
};

struct CohortReport {
  std::string reference_tester;
  std::vector<TesterProfile> testers;  // natural order of tester id
  std::vector<std::string> levels;     // natural order
  std::map<TesterLevel, double, TesterLevelLess> per_tester_level_times;
  std::map<TesterLevel, double, TesterLevelLess> deltas_vs_reference;
  std::map<GroupLevel, GroupSummary, GroupLevelLess> group_summaries;
};

/// delta = tester time - reference time, per level. Throws MissingReference
/// when the reference has no time for a level another tester played.
CohortReport cohort_analysis(std::span<const CohortEntry> entries, std::string_view reference_tester);
CohortReport cohort_analysis(std::span<const std::tuple<TesterProfile, std::string, ScoreReport>> reports,
                             std::string_view reference_tester);

/// CSV with header "tester_id,exp_fire_drills,exp_vr,exp_games" and values
/// Low / Medium / High. Throws ParseError / SchemaError.
std::vector<TesterProfile> parse_profiles_csv(std::string_view text);

/// CSV with header "tester_id,level,time_s"; every tester must have a profile.
std::vector<CohortEntry> parse_times_csv(std::string_view text, std::span<const TesterProfile> profiles);

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { json, table, csv };
std::optional<ReportFormat> parse_report_format(std::string_view text);

/// Score CSV columns: scenario_id,phase,time_s (one row per phase in drill
/// order, then a "total" row).
std::string emit_report(const ScoreReport& report, ReportFormat format);
/// Cohort CSV columns: tester,level,time_s,delta_s sorted by tester then level.
std::string emit_report(const CohortReport& report, ReportFormat format);

}  // namespace shipdrill
