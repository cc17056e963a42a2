#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shipdrill/event_log.hpp"
#include "shipdrill/fire.hpp"
#include "shipdrill/protocol.hpp"
#include "shipdrill/scenario.hpp"

namespace shipdrill {

inline constexpr int kTicksPerSecond = 10;
inline constexpr double kTickSeconds = 1.0 / kTicksPerSecond;
inline constexpr double kWalkSpeed = 1.4;  // m/s
inline constexpr std::string_view kEngineVersion = "1";

inline double ticks_to_seconds(std::uint64_t ticks) { return static_cast<double>(ticks) / kTicksPerSecond; }

/// Ticks needed to walk a passage of the given length, at least one.
std::uint32_t walk_ticks(double length_m);

// ---------------------------------------------------------------------------
// Commands

enum class CommandKind { move_to, pick_up, start_apply, stop_apply, use_phone, pull_alarm, assess, evacuate, wait };

std::string_view to_string(CommandKind kind);
std::optional<CommandKind> parse_command_kind(std::string_view text);

struct ActionCommand {
  std::uint64_t tick = 0;
  CommandKind kind = CommandKind::wait;
  std::string target;                 // move_to: compartment id, pick_up: equipment id
  std::optional<Severity> severity;   // assess

  static ActionCommand move_to(std::uint64_t tick, std::string compartment) {
    return {tick, CommandKind::move_to, std::move(compartment), std::nullopt};
  }
  static ActionCommand pick_up(std::uint64_t tick, std::string equipment) {
    return {tick, CommandKind::pick_up, std::move(equipment), std::nullopt};
  }
  static ActionCommand assess(std::uint64_t tick, Severity severity) {
    return {tick, CommandKind::assess, {}, severity};
  }
  static ActionCommand simple(std::uint64_t tick, CommandKind kind) { return {tick, kind, {}, std::nullopt}; }

  bool operator==(const ActionCommand&) const = default;
};

/// {"tick":N,"kind":"move_to","target":"galley"} and friends. `target` is
/// present only for move_to and pick_up, `severity` only for assess.
nlohmann::json command_to_json(const ActionCommand& command);
/// Strict; throws SchemaError.
ActionCommand command_from_json(const nlohmann::json& value);
/// JSON lines, blank lines ignored. Throws ParseError / SchemaError.
std::vector<ActionCommand> parse_command_script(std::string_view text);
std::string to_jsonl(std::span<const ActionCommand> commands);

// ---------------------------------------------------------------------------
// Session state

struct Transit {
  std::size_t passage = 0;
  std::string toward;
  std::uint32_t ticks_done = 0;
  std::uint32_t ticks_total = 1;
  double progress() const { return static_cast<double>(ticks_done) / ticks_total; }
  bool operator==(const Transit&) const = default;
};

struct TraineeState {
  std::string compartment;  // where the trainee is, or last left while in transit
  std::optional<Transit> in_transit;
  std::vector<std::string> route;  // waypoints after the current passage
  std::optional<std::string> carrying_extinguisher;
  bool applying_agent = false;
  bool operator==(const TraineeState&) const = default;
};

enum class FinishReason { complete, time_limit, commands_exhausted, aborted, force_closed };
std::string_view to_string(FinishReason reason);
std::optional<FinishReason> parse_finish_reason(std::string_view text);

/// One drill run: a fixed-timestep loop over trainee, fire and phase machine
/// with an append-only event log.
///
/// Each step(command) covers the simulated interval [tick, tick+1):
///   1. the command takes effect (events stamped `tick`);
///   2. the trainee walks, the fire evolves and cues are perceived over the
///      interval (events stamped `tick + 1`).
/// A phase entered by a command therefore starts at the command's tick, and
/// one entered by the simulation starts when the interval ends.
class DrillSession {
 public:
  DrillSession(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);

  const Scenario& scenario() const noexcept { return *scenario_; }
  std::shared_ptr<const Scenario> shared_scenario() const noexcept { return scenario_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t tick() const noexcept { return tick_; }
  double elapsed_s() const noexcept { return ticks_to_seconds(tick_); }
  const TraineeState& trainee() const noexcept { return trainee_; }
  const FireState& fire() const noexcept { return fire_; }
  DrillPhase phase() const noexcept { return protocol_.phase(); }
  const TaskChecklist& checklist() const noexcept { return protocol_.checklist(); }
  const std::vector<DrillError>& errors() const noexcept { return protocol_.errors(); }
  const std::vector<SessionEvent>& log() const noexcept { return log_; }
  const CueSet& perceived_cues() const noexcept { return cues_; }
  bool finished() const noexcept { return finished_; }

  /// Throws TickMismatch unless command.tick == tick().
  void step(const ActionCommand& command);

  /// Records that a live command asked for `requested_tick` but runs now.
  void note_rebase(std::uint64_t requested_tick);

  /// Appends session_finished, which records the state hash and a digest of
  /// every line logged before it. Further steps throw.
  void finish(FinishReason reason);

  /// Canonical (tick, trainee, fire, phase, checklist, errors) document.
  nlohmann::json canonical_state() const;
  /// FNV-1a 64 of canonical_state().dump().
  std::uint64_t state_hash() const;

 private:
  void emit(std::uint64_t tick, std::string kind, nlohmann::json data);
  void reject(const ActionCommand& command, std::string_view reason);
  void dispatch(const ProtocolEvent& event, std::uint64_t stamp);
  bool co_located_with(EquipmentKind kind, std::string* equipment_id) const;
  void set_route(const std::vector<std::string>& path, std::uint64_t stamp);
  void depart(std::uint64_t stamp);
  void stop_agent(std::uint64_t stamp, std::string_view why);
  void apply_command(const ActionCommand& command);
  void advance_movement(std::uint64_t stamp);
  void advance_fire(std::uint64_t stamp);
  void perceive(std::uint64_t stamp);

  std::shared_ptr<const Scenario> scenario_;
  std::uint64_t seed_ = 0;
  std::uint64_t tick_ = 0;
  TraineeState trainee_;
  FireState fire_;
  DrillProtocol protocol_;
  CueSet cues_;
  std::vector<SessionEvent> log_;
  std::uint64_t log_digest_ = kFnvOffsetBasis;
  bool finished_ = false;
};

/// Validates the scenario first; throws ScenarioInvalid on error findings.
DrillSession new_session(const Scenario& scenario, std::uint64_t seed);
DrillSession new_session(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);

}  // namespace shipdrill
