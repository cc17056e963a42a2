#include "shipdrill/engine.hpp"

#include <cmath>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace {

using nlohmann::json;

constexpr std::string_view kCommandNames[] = {"move_to",   "pick_up",    "start_apply", "stop_apply", "use_phone",
                                              "pull_alarm", "assess",    "evacuate",    "wait"};
constexpr std::string_view kFinishNames[] = {"complete", "time_limit", "commands_exhausted", "aborted",
                                             "force_closed"};

bool takes_target(CommandKind kind) { return kind == CommandKind::move_to || kind == CommandKind::pick_up; }

bool is_muster(const Compartment& c) { return c.kind == CompartmentKind::muster_area; }

}  // namespace

std::uint32_t walk_ticks(double length_m) {
  const double ticks = std::ceil(length_m / (kWalkSpeed * kTickSeconds) - 1e-9);
  return ticks < 1.0 ? 1u : static_cast<std::uint32_t>(ticks);
}

std::string_view to_string(CommandKind kind) { return kCommandNames[static_cast<int>(kind)]; }

std::optional<CommandKind> parse_command_kind(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kCommandNames); ++i) {
    if (kCommandNames[i] == text) return static_cast<CommandKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(FinishReason reason) { return kFinishNames[static_cast<int>(reason)]; }

std::optional<FinishReason> parse_finish_reason(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kFinishNames); ++i) {
    if (kFinishNames[i] == text) return static_cast<FinishReason>(i);
  }
  return std::nullopt;
}

json command_to_json(const ActionCommand& command) {
  json j{{"tick", command.tick}, {"kind", to_string(command.kind)}};
  if (takes_target(command.kind)) j["target"] = command.target;
  if (command.kind == CommandKind::assess && command.severity) j["severity"] = to_string(*command.severity);
  return j;
}

ActionCommand command_from_json(const json& value) {
  if (!value.is_object()) throw SchemaError("command", "expected an object");
  ActionCommand command;
  const auto tick = value.find("tick");
  if (tick == value.end() || !tick->is_number_unsigned()) throw SchemaError("command.tick", "expected an unsigned integer");
  command.tick = tick->get<std::uint64_t>();
  const auto kind = value.find("kind");
  if (kind == value.end() || !kind->is_string()) throw SchemaError("command.kind", "expected a string");
  const auto parsed = parse_command_kind(kind->get<std::string>());
  if (!parsed) throw SchemaError("command.kind", "unknown command '" + kind->get<std::string>() + "'");
  command.kind = *parsed;

  std::size_t expected_keys = 2;
  if (takes_target(command.kind)) {
    const auto target = value.find("target");
    if (target == value.end() || !target->is_string()) throw SchemaError("command.target", "expected a string");
    command.target = target->get<std::string>();
    ++expected_keys;
  }
  if (command.kind == CommandKind::assess) {
    const auto severity = value.find("severity");
    if (severity == value.end() || !severity->is_string()) throw SchemaError("command.severity", "expected a string");
    command.severity = parse_severity(severity->get<std::string>());
    if (!command.severity) throw SchemaError("command.severity", "expected controllable or imminent_threat");
    ++expected_keys;
  }
  if (value.size() != expected_keys) throw SchemaError("command", "unexpected field for " + std::string(to_string(command.kind)));
  return command;
}

std::vector<ActionCommand> parse_command_script(std::string_view text) {
  std::vector<ActionCommand> commands;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json doc;
    try {
      doc = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.byte, e.what());
    }
    commands.push_back(command_from_json(doc));
  }
  return commands;
}

std::string to_jsonl(std::span<const ActionCommand> commands) {
  std::string out;
  for (const auto& c : commands) out += command_to_json(c).dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

DrillSession::DrillSession(std::shared_ptr<const Scenario> scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), seed_(seed) {
  trainee_.compartment = scenario_->trainee_start;
  fire_ = FireState::ignite(scenario_->fire);
  emit(0, "session_started",
       {{"scenario_id", scenario_->id}, {"seed", seed_}, {"engine_version", std::string(kEngineVersion)}});
}

DrillSession new_session(std::shared_ptr<const Scenario> scenario, std::uint64_t seed) {
  auto report = validate_scenario(*scenario);
  if (!report.ok) throw ScenarioInvalid(std::move(report));
  return DrillSession(std::move(scenario), seed);
}

DrillSession new_session(const Scenario& scenario, std::uint64_t seed) {
  return new_session(std::make_shared<const Scenario>(scenario), seed);
}

void DrillSession::emit(std::uint64_t tick, std::string kind, json data) {
  const std::uint64_t seq = log_.size();
  log_.push_back({tick, seq, std::move(kind), std::move(data)});
  log_digest_ = fnv1a64(to_json_line(log_.back()) + "\n", log_digest_);
}

void DrillSession::reject(const ActionCommand& command, std::string_view reason) {
  emit(tick_, "rejected", {{"command", to_string(command.kind)}, {"reason", reason}});
}

void DrillSession::dispatch(const ProtocolEvent& event, std::uint64_t stamp) {
  auto outcome = protocol_.apply(event, scenario_->fire, stamp);
  if (outcome.changed()) {
    emit(stamp, "phase_changed",
         {{"from", to_string(outcome.from)}, {"to", to_string(outcome.to)}, {"event", to_string(event.kind)}});
  }
  for (const auto& error : outcome.errors) {
    emit(stamp, "error_logged", {{"error", to_string(error.kind)}, {"detail", error.detail}});
  }
  if (auto done = protocol_.settle()) {
    emit(stamp, "phase_changed", {{"from", to_string(done->from)}, {"to", to_string(done->to)}, {"event", "settled"}});
  }
}

bool DrillSession::co_located_with(EquipmentKind kind, std::string* equipment_id) const {
  if (trainee_.in_transit) return false;
  const auto ids = equipment_in(scenario_->layout, trainee_.compartment, kind);
  if (ids.empty()) return false;
  if (equipment_id) *equipment_id = ids.front();
  return true;
}

void DrillSession::stop_agent(std::uint64_t stamp, std::string_view why) {
  if (!trainee_.applying_agent) return;
  trainee_.applying_agent = false;
  emit(stamp, "agent_stopped", {{"reason", why}});
}

void DrillSession::set_route(const std::vector<std::string>& path, std::uint64_t stamp) {
  // path[0] is where the trainee stands (or is heading while in transit).
  trainee_.route.assign(path.begin() + 1, path.end());
  if (!trainee_.in_transit) depart(stamp);
}

void DrillSession::depart(std::uint64_t stamp) {
  if (trainee_.route.empty()) return;
  const auto& layout = scenario_->layout;
  const auto next = trainee_.route.front();
  trainee_.route.erase(trainee_.route.begin());
  const auto here = layout.index_of(trainee_.compartment);
  const auto there = layout.index_of(next);
  // Shortest of any parallel passages between the two compartments.
  std::optional<std::size_t> passage;
  for (const auto& link : layout.links(here)) {
    if (link.neighbor != there) continue;
    if (!passage || layout.passages()[link.passage].length_m < layout.passages()[*passage].length_m) {
      passage = link.passage;
    }
  }
  const auto ticks = walk_ticks(layout.passages()[*passage].length_m);
  trainee_.in_transit = Transit{*passage, next, 0, ticks};
  emit(stamp, "departed", {{"from", trainee_.compartment}, {"to", next}, {"ticks", ticks}});
}

void DrillSession::apply_command(const ActionCommand& command) {
  const auto& layout = scenario_->layout;
  const std::uint64_t t = tick_;
  switch (command.kind) {
    case CommandKind::wait:
      return;

    case CommandKind::move_to: {
      if (!layout.contains(command.target)) return reject(command, "unknown_compartment");
      const auto& origin = trainee_.in_transit ? trainee_.in_transit->toward : trainee_.compartment;
      if (!trainee_.in_transit && command.target == origin) return reject(command, "already_there");
      const auto route = shortest_route_to(
          layout, origin, [&](const Compartment& c) { return c.id == command.target; }, PassageFilter::any);
      if (!route) return reject(command, "unreachable");
      stop_agent(t, "moving");
      set_route(route->compartments, t);
      return;
    }

    case CommandKind::pick_up: {
      const Equipment* equipment = layout.find_equipment(command.target);
      if (!equipment) return reject(command, "unknown_equipment");
      if (equipment->kind != EquipmentKind::extinguisher) return reject(command, "not_portable");
      if (trainee_.in_transit || equipment->compartment != trainee_.compartment) {
        return reject(command, "not_co_located");
      }
      if (trainee_.carrying_extinguisher) return reject(command, "hands_full");
      trainee_.carrying_extinguisher = equipment->id;
      emit(t, "picked_up", {{"equipment", equipment->id}});
      return;
    }

    case CommandKind::start_apply: {
      if (!trainee_.carrying_extinguisher) return reject(command, "no_extinguisher");
      if (trainee_.in_transit) return reject(command, "in_transit");
      if (trainee_.applying_agent) return reject(command, "already_applying");
      trainee_.applying_agent = true;
      emit(t, "agent_started", {{"compartment", trainee_.compartment}});
      if (phase() != DrillPhase::suppressing) dispatch(ProtocolEvent::of(ProtocolEventKind::begin_suppression), t);
      return;
    }

    case CommandKind::stop_apply:
      if (!trainee_.applying_agent) return reject(command, "not_applying");
      stop_agent(t, "requested");
      return;

    case CommandKind::use_phone: {
      std::string phone;
      if (!co_located_with(EquipmentKind::emergency_phone, &phone)) return reject(command, "not_co_located");
      emit(t, "phone_used", {{"equipment", phone}});
      dispatch(ProtocolEvent::of(ProtocolEventKind::report_via_phone), t);
      return;
    }

    case CommandKind::pull_alarm: {
      std::string alarm;
      if (!co_located_with(EquipmentKind::alarm_call_point, &alarm)) return reject(command, "not_co_located");
      emit(t, "alarm_pulled", {{"equipment", alarm}});
      dispatch(ProtocolEvent::of(ProtocolEventKind::activate_alarm), t);
      return;
    }

    case CommandKind::assess: {
      if (!command.severity) return reject(command, "missing_severity");
      emit(t, "assessment",
           {{"submitted", to_string(*command.severity)},
            {"correct", assessment_verdict(*command.severity, scenario_->fire)}});
      dispatch(ProtocolEvent::assess(*command.severity), t);
      return;
    }

    case CommandKind::evacuate: {
      const auto p = phase();
      if (p != DrillPhase::evacuating && p != DrillPhase::at_muster && p != DrillPhase::complete) {
        dispatch(ProtocolEvent::of(ProtocolEventKind::begin_evacuation), t);
      }
      stop_agent(t, "evacuating");
      const auto& origin = trainee_.in_transit ? trainee_.in_transit->toward : trainee_.compartment;
      auto route = shortest_route_to(layout, origin, is_muster, PassageFilter::signed_only);
      if (!route) route = shortest_route_to(layout, origin, is_muster, PassageFilter::any);
      if (!route) return reject(command, "no_muster_reachable");
      emit(t, "evacuation_ordered", {{"muster", route->compartments.back()}});
      if (!trainee_.in_transit && route->compartments.size() == 1) {
        if (phase() == DrillPhase::evacuating) dispatch(ProtocolEvent::of(ProtocolEventKind::arrive_at_muster), t);
        return;
      }
      set_route(route->compartments, t);
      return;
    }
  }
}

void DrillSession::advance_movement(std::uint64_t stamp) {
  if (!trainee_.in_transit) return;
  auto& transit = *trainee_.in_transit;
  if (++transit.ticks_done < transit.ticks_total) return;

  const std::string from = trainee_.compartment;
  trainee_.compartment = transit.toward;
  trainee_.in_transit.reset();
  emit(stamp, "arrived", {{"compartment", trainee_.compartment}, {"from", from}});
  if (is_muster(scenario_->layout.compartment(trainee_.compartment)) && phase() == DrillPhase::evacuating) {
    dispatch(ProtocolEvent::of(ProtocolEventKind::arrive_at_muster), stamp);
  }
  depart(stamp);
}

void DrillSession::advance_fire(std::uint64_t stamp) {
  if (fire_.status != FireStatus::burning) return;
  const bool applying = trainee_.applying_agent && !trainee_.in_transit;
  fire_ = fire_tick(fire_, kTickSeconds, applying, trainee_.compartment);
  if (fire_.status == FireStatus::extinguished) {
    emit(stamp, "fire_extinguished", {{"compartment", fire_.spec.compartment}});
    stop_agent(stamp, "fire_out");
    dispatch(ProtocolEvent::of(ProtocolEventKind::fire_extinguished), stamp);
  }
}

void DrillSession::perceive(std::uint64_t stamp) {
  const CueSet cues = cues_at(fire_, scenario_->layout, trainee_.compartment);
  if (cues != cues_) {
    cues_ = cues;
    emit(stamp, "cue", {{"compartment", trainee_.compartment}, {"visual", cues.visual}, {"auditory", cues.auditory}});
  }
  if (!cues.empty() && phase() == DrillPhase::patrol) {
    dispatch(ProtocolEvent::of(ProtocolEventKind::perceive_cue), stamp);
  }
}

void DrillSession::step(const ActionCommand& command) {
  if (finished_) throw Error("session already finished");
  if (command.tick != tick_) throw TickMismatch(tick_, command.tick);
  if (command.kind != CommandKind::wait) emit(tick_, "command", command_to_json(command));

  apply_command(command);
  const std::uint64_t end = tick_ + 1;
  advance_movement(end);
  advance_fire(end);
  perceive(end);
  tick_ = end;
}

void DrillSession::note_rebase(std::uint64_t requested_tick) {
  if (finished_) throw Error("session already finished");
  emit(tick_, "rebase", {{"requested_tick", requested_tick}});
}

void DrillSession::finish(FinishReason reason) {
  if (finished_) throw Error("session already finished");
  emit(tick_, "session_finished",
       {{"state_hash", to_hex(state_hash())},
        {"log_digest", to_hex(log_digest_)},
        {"total_ticks", tick_},
        {"reason", to_string(reason)}});
  finished_ = true;
}

json DrillSession::canonical_state() const {
  json transit = nullptr;
  if (trainee_.in_transit) {
    const auto& t = *trainee_.in_transit;
    transit = {{"passage", t.passage}, {"toward", t.toward}, {"ticks_done", t.ticks_done}, {"ticks_total", t.ticks_total}};
  }
  json errors = json::array();
  for (const auto& e : protocol_.errors()) {
    errors.push_back({{"kind", to_string(e.kind)}, {"tick", e.tick}, {"detail", e.detail}});
  }
  const auto& c = protocol_.checklist();
  return {
      {"tick", tick_},
      {"trainee",
       {{"compartment", trainee_.compartment},
        {"in_transit", transit},
        {"route", trainee_.route},
        {"carrying_extinguisher",
         trainee_.carrying_extinguisher ? json(*trainee_.carrying_extinguisher) : json(nullptr)},
        {"applying_agent", trainee_.applying_agent}}},
      {"fire",
       {{"intensity", fire_.intensity},
        {"remaining_work_s", fire_.remaining_work_s},
        {"status", to_string(fire_.status)}}},
      {"phase", to_string(protocol_.phase())},
      {"checklist",
       {{"discovered", c.discovered},
        {"reported", c.reported},
        {"alarm_raised", c.alarm_raised},
        {"assessed", c.assessed},
        {"assessment_correct", c.assessment_correct},
        {"suppression_done_or_correctly_skipped", c.suppression_done_or_correctly_skipped},
        {"mustered", c.mustered}}},
      {"errors", errors},
  };
}

std::uint64_t DrillSession::state_hash() const { return fnv1a64(canonical_state().dump()); }

}  // namespace shipdrill
