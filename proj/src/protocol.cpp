#include "shipdrill/protocol.hpp"

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace {

constexpr std::string_view kPhaseNames[] = {"patrol",     "fire_discovered", "reported",
                                            "alarm_raised", "severity_assessed", "suppressing",
                                            "evacuating", "at_muster",       "complete"};
constexpr std::string_view kEventNames[] = {"perceive_cue",      "report_via_phone", "activate_alarm",
                                            "submit_assessment", "begin_suppression", "fire_extinguished",
                                            "begin_evacuation",  "arrive_at_muster"};
constexpr std::string_view kErrorNames[] = {"extinguish_attempt_on_imminent_fire", "premature_evacuation",
                                            "alarm_before_report", "action_out_of_phase"};

DrillError out_of_phase(DrillPhase phase, ProtocolEventKind event, std::uint64_t tick) {
  return {DrillErrorKind::action_out_of_phase, tick,
          std::string(to_string(event)) + " is not expected during " + std::string(to_string(phase))};
}

void check_payload(const ProtocolEvent& event) {
  const bool is_assessment = event.kind == ProtocolEventKind::submit_assessment;
  if (is_assessment != event.assessment.has_value()) {
    throw InvalidEvent(is_assessment ? "submit_assessment requires a severity class"
                                     : std::string(to_string(event.kind)) + " takes no severity class");
  }
}

}  // namespace

std::string_view to_string(DrillPhase phase) { return kPhaseNames[static_cast<int>(phase)]; }
std::string_view to_string(ProtocolEventKind kind) { return kEventNames[static_cast<int>(kind)]; }
std::string_view to_string(DrillErrorKind kind) { return kErrorNames[static_cast<int>(kind)]; }

std::optional<DrillPhase> parse_phase(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kPhaseNames); ++i) {
    if (kPhaseNames[i] == text) return static_cast<DrillPhase>(i);
  }
  return std::nullopt;
}

std::optional<DrillErrorKind> parse_drill_error_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kErrorNames); ++i) {
    if (kErrorNames[i] == text) return static_cast<DrillErrorKind>(i);
  }
  return std::nullopt;
}

ProtocolEventKind parse_protocol_event(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kEventNames); ++i) {
    if (kEventNames[i] == text) return static_cast<ProtocolEventKind>(i);
  }
  throw InvalidEvent("unknown protocol event '" + std::string(text) + "'");
}

Transition phase_transition(DrillPhase phase, const ProtocolEvent& event, const FireSpec& truth,
                            std::uint64_t tick) {
  using P = DrillPhase;
  using E = ProtocolEventKind;

  check_payload(event);

  const Severity severity = severity_class(truth);
  switch (event.kind) {
    case E::perceive_cue:
      if (phase == P::patrol) return {P::fire_discovered, {}};
      break;
    case E::report_via_phone:
      if (phase == P::fire_discovered) return {P::reported, {}};
      break;
    case E::activate_alarm:
      if (phase == P::reported) return {P::alarm_raised, {}};
      if (phase == P::fire_discovered) {
        return {P::alarm_raised,
                {{DrillErrorKind::alarm_before_report, tick, "fire alarm activated before the ship master was informed"}}};
      }
      break;
    case E::submit_assessment:
      if (phase == P::alarm_raised) return {P::severity_assessed, {}};
      break;
    case E::begin_suppression:
      if (phase == P::severity_assessed) {
        if (severity == Severity::imminent_threat) {
          return {P::suppressing,
                  {{DrillErrorKind::extinguish_attempt_on_imminent_fire, tick,
                    "suppression started on a fire that cannot be extinguished"}}};
        }
        return {P::suppressing, {}};
      }
      break;
    case E::fire_extinguished:
      if (phase == P::suppressing) return {P::evacuating, {}};
      break;
    case E::begin_evacuation:
      if (phase == P::severity_assessed || phase == P::suppressing) {
        if (severity == Severity::controllable) {
          return {P::evacuating,
                  {{DrillErrorKind::premature_evacuation, tick, "evacuation started while the fire was still controllable"}}};
        }
        return {P::evacuating, {}};
      }
      break;
    case E::arrive_at_muster:
      if (phase == P::evacuating) return {P::at_muster, {}};
      break;
  }
  return {phase, {out_of_phase(phase, event.kind, tick)}};
}

bool assessment_verdict(Severity submitted, const FireSpec& spec) { return submitted == severity_class(spec); }

std::optional<std::string> next_required_task(DrillPhase phase, const FireSpec& spec, bool guidance_enabled,
                                              const MessageCatalog& catalog) {
  if (!guidance_enabled) return std::nullopt;
  std::string key = "phase." + std::string(to_string(phase));
  if (phase == DrillPhase::severity_assessed || phase == DrillPhase::suppressing) {
    key += "." + std::string(to_string(severity_class(spec)));
  }
  return catalog.at(key);
}

DrillProtocol::Outcome DrillProtocol::apply(const ProtocolEvent& event, const FireSpec& truth, std::uint64_t tick) {
  using P = DrillPhase;
  using E = ProtocolEventKind;
  check_payload(event);
  const P before = phase_;
  // A report made after an early alarm still counts; the ordering slip was
  // already recorded as alarm_before_report.
  if (event.kind == E::report_via_phone && !checklist_.reported && checklist_.alarm_raised &&
      phase_ != P::complete) {
    checklist_.reported = true;
    return {before, before, {}};
  }
  // The fire can go out while the phase machine lags behind (agent applied
  // before the assessment). That is a fact about the world, not a mistake.
  if (event.kind == E::fire_extinguished && phase_ != P::suppressing) {
    checklist_.suppression_done_or_correctly_skipped = true;
    return {before, before, {}};
  }
  if (event.kind == E::begin_evacuation && phase_ == P::severity_assessed &&
      checklist_.suppression_done_or_correctly_skipped) {
    phase_ = P::evacuating;
    return {before, phase_, {}};
  }

  Transition t = phase_transition(phase_, event, truth, tick);
  const bool accepted = t.phase != phase_;
  if (accepted) {
    switch (event.kind) {
      case E::perceive_cue: checklist_.discovered = true; break;
      case E::report_via_phone: checklist_.reported = true; break;
      case E::activate_alarm: checklist_.alarm_raised = true; break;
      case E::submit_assessment:
        checklist_.assessed = true;
        checklist_.assessment_correct = assessment_verdict(*event.assessment, truth);
        break;
      case E::fire_extinguished: checklist_.suppression_done_or_correctly_skipped = true; break;
      case E::begin_evacuation:
        if (severity_class(truth) == Severity::imminent_threat) {
          checklist_.suppression_done_or_correctly_skipped = true;
        }
        break;
      case E::arrive_at_muster: checklist_.mustered = true; break;
      case E::begin_suppression: break;
    }
  }
  phase_ = t.phase;
  errors_.insert(errors_.end(), t.errors.begin(), t.errors.end());
  return {before, phase_, std::move(t.errors)};
}

std::optional<DrillProtocol::Outcome> DrillProtocol::settle() {
  if (phase_ != DrillPhase::at_muster || !checklist_.ready_for_completion()) return std::nullopt;
  phase_ = DrillPhase::complete;
  return Outcome{DrillPhase::at_muster, DrillPhase::complete, {}};
}

}  // namespace shipdrill
