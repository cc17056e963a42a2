#include "shipdrill/fire.hpp"

#include <algorithm>
#include <stdexcept>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace {
// Snaps accumulated floating-point residue so that N ticks of dt exactly
// consume N*dt seconds of work.
constexpr double kWorkEpsilon = 1e-9;
}  // namespace

std::string_view to_string(Severity severity) {
  return severity == Severity::controllable ? "controllable" : "imminent_threat";
}

std::string_view to_string(FireStatus status) {
  return status == FireStatus::burning ? "burning" : "extinguished";
}

std::optional<Severity> parse_severity(std::string_view text) {
  if (text == "controllable") return Severity::controllable;
  if (text == "imminent_threat") return Severity::imminent_threat;
  return std::nullopt;
}

FireState FireState::ignite(const FireSpec& spec) {
  FireState state;
  state.spec = spec;
  state.intensity = std::clamp(spec.initial_intensity, 0.0, kIntensityMax);
  state.remaining_work_s = spec.extinguishable ? spec.extinguish_work_s.value_or(0.0) : 0.0;
  state.status = FireStatus::burning;
  return state;
}

FireState fire_tick(const FireState& state, double dt, bool agent_applied,
                    std::string_view applier_compartment) {
  if (state.status == FireStatus::extinguished) throw FireAlreadyOut();
  if (!(dt > 0.0)) throw std::invalid_argument("fire_tick: dt must be positive");

  FireState next = state;
  next.intensity = std::clamp(state.intensity + state.spec.growth_rate * dt, 0.0, kIntensityMax);
  if (agent_applied && state.spec.extinguishable && applier_compartment == state.spec.compartment) {
    double remaining = state.remaining_work_s - dt;
    if (remaining <= kWorkEpsilon) remaining = 0.0;
    next.remaining_work_s = remaining;
    if (remaining == 0.0) next.status = FireStatus::extinguished;
  }
  return next;
}

CueSet cues_at(const FireState& state, const ShipLayout& layout, std::string_view observer) {
  const auto observer_index = layout.index_of(observer);
  CueSet cues;
  if (state.status != FireStatus::burning) return cues;
  const auto fire_index = layout.index_of(state.spec.compartment);
  cues.visual = observer_index == fire_index;
  const int hops = hop_distances(layout, fire_index)[observer_index];
  cues.auditory = hops >= 0 && hops <= state.spec.audible_hops;
  return cues;
}

Severity severity_class(const FireSpec& spec) {
  return spec.extinguishable ? Severity::controllable : Severity::imminent_threat;
}

}  // namespace shipdrill
