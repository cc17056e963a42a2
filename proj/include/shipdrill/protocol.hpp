#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shipdrill/catalog.hpp"
#include "shipdrill/fire.hpp"

namespace shipdrill {

enum class DrillPhase {
  patrol,
  fire_discovered,
  reported,
  alarm_raised,
  severity_assessed,
  suppressing,
  evacuating,
  at_muster,
  complete,
};
inline constexpr int kPhaseCount = 9;

enum class ProtocolEventKind {
  perceive_cue,
  report_via_phone,
  activate_alarm,
  submit_assessment,
  begin_suppression,
  fire_extinguished,
  begin_evacuation,
  arrive_at_muster,
};

enum class DrillErrorKind {
  extinguish_attempt_on_imminent_fire,
  premature_evacuation,
  alarm_before_report,
  action_out_of_phase,
};

std::string_view to_string(DrillPhase phase);
std::string_view to_string(ProtocolEventKind kind);
std::string_view to_string(DrillErrorKind kind);
std::optional<DrillPhase> parse_phase(std::string_view text);
std::optional<DrillErrorKind> parse_drill_error_kind(std::string_view text);
/// Throws InvalidEvent for names outside the protocol vocabulary.
ProtocolEventKind parse_protocol_event(std::string_view text);

/// Position of a phase along the drill sequence; transitions never decrease it.
constexpr int phase_rank(DrillPhase phase) { return static_cast<int>(phase); }

struct ProtocolEvent {
  ProtocolEventKind kind;
  std::optional<Severity> assessment;  // submit_assessment only

  static ProtocolEvent of(ProtocolEventKind kind) { return {kind, std::nullopt}; }
  static ProtocolEvent assess(Severity s) { return {ProtocolEventKind::submit_assessment, s}; }
};

/// A recorded trainee mistake. Errors annotate the run; they never block it.
struct DrillError {
  DrillErrorKind kind;
  std::uint64_t tick = 0;
  std::string detail;
  bool operator==(const DrillError&) const = default;
};

struct TaskChecklist {
  bool discovered = false;
  bool reported = false;
  bool alarm_raised = false;
  bool assessed = false;
  bool assessment_correct = false;
  bool suppression_done_or_correctly_skipped = false;
  bool mustered = false;

  /// Tasks that must all be done before the drill can be marked complete.
  bool ready_for_completion() const noexcept {
    return discovered && reported && alarm_raised && assessed && mustered;
  }
  bool operator==(const TaskChecklist&) const = default;
};

struct Transition {
  DrillPhase phase;
  std::vector<DrillError> errors;
};

/// The bare transition graph. Edges:
///   patrol -perceive_cue-> fire_discovered -report_via_phone-> reported
///   reported -activate_alarm-> alarm_raised -submit_assessment-> severity_assessed
///   severity_assessed -begin_suppression-> suppressing -fire_extinguished-> evacuating
///   severity_assessed -begin_evacuation-> evacuating
///   suppressing -begin_evacuation-> evacuating
///   evacuating -arrive_at_muster-> at_muster
///   fire_discovered -activate_alarm-> alarm_raised   (flagged alarm_before_report)
/// Suppressing an imminent threat and leaving a controllable fire burning are
/// accepted but flagged. Any other event leaves the phase unchanged and
/// records action_out_of_phase. Throws InvalidEvent when the assessment
/// payload is missing or attached to the wrong event.
Transition phase_transition(DrillPhase phase, const ProtocolEvent& event, const FireSpec& truth,
                            std::uint64_t tick = 0);

bool assessment_verdict(Severity submitted, const FireSpec& spec);

/// Hint for the next edge out of `phase`, or nullopt when guidance is off.
std::optional<std::string> next_required_task(DrillPhase phase, const FireSpec& spec, bool guidance_enabled,
                                              const MessageCatalog& catalog = MessageCatalog::builtin());

/// Phase machine plus checklist and error record for one session.
class DrillProtocol {
 public:
  struct Outcome {
    DrillPhase from;
    DrillPhase to;
    std::vector<DrillError> errors;
    bool changed() const noexcept { return from != to; }
  };

  DrillPhase phase() const noexcept { return phase_; }
  const TaskChecklist& checklist() const noexcept { return checklist_; }
  const std::vector<DrillError>& errors() const noexcept { return errors_; }

  Outcome apply(const ProtocolEvent& event, const FireSpec& truth, std::uint64_t tick);

  /// Moves at_muster to complete once every required task is done.
  std::optional<Outcome> settle();

 private:
  DrillPhase phase_ = DrillPhase::patrol;
  TaskChecklist checklist_;
  std::vector<DrillError> errors_;
};

}  // namespace shipdrill
