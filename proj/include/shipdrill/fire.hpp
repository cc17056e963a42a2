#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "shipdrill/layout.hpp"

namespace shipdrill {

inline constexpr double kIntensityMax = 100.0;

enum class Severity { controllable, imminent_threat };
enum class FireStatus { burning, extinguished };

std::string_view to_string(Severity severity);
std::string_view to_string(FireStatus status);
std::optional<Severity> parse_severity(std::string_view text);

struct FireSpec {
  std::string compartment;
  double initial_intensity = 0.0;
  double growth_rate = 0.0;  // intensity units per second
  bool extinguishable = true;
  /// Seconds of continuous agent application needed. Ignored when the fire
  /// is not extinguishable, in which case it may be absent.
  std::optional<double> extinguish_work_s;
  int audible_hops = 1;
  bool operator==(const FireSpec&) const = default;
};

struct FireState {
  FireSpec spec;
  double intensity = 0.0;
  double remaining_work_s = 0.0;
  FireStatus status = FireStatus::burning;

  static FireState ignite(const FireSpec& spec);
  bool operator==(const FireState&) const = default;
};

struct CueSet {
  bool visual = false;
  bool auditory = false;
  bool empty() const noexcept { return !visual && !auditory; }
  bool operator==(const CueSet&) const = default;
};

/// Advances the fire by dt seconds. Work is only consumed when the agent is
/// applied from inside the fire's compartment and the fire is extinguishable.
/// Throws FireAlreadyOut on an extinguished fire.
FireState fire_tick(const FireState& state, double dt, bool agent_applied,
                    std::string_view applier_compartment);

/// Visual cue only inside the fire compartment; auditory cue within
/// spec.audible_hops passages. An extinguished fire emits nothing.
CueSet cues_at(const FireState& state, const ShipLayout& layout, std::string_view observer);

Severity severity_class(const FireSpec& spec);

}  // namespace shipdrill
