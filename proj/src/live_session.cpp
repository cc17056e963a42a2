#include "shipdrill/live_session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shipdrill/catalog.hpp"
#include "shipdrill/errors.hpp"
#include "shipdrill/runner.hpp"
#include "shipdrill/scoring.hpp"

namespace shipdrill {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ScenarioSet builtin_scenario_set() {
  ScenarioSet set;
  for (const auto& level : builtin_levels()) set.emplace(level.id, std::make_shared<const Scenario>(level));
  return set;
}

ScenarioSet load_scenario_dir(const std::filesystem::path& dir,
                              std::function<void(const std::filesystem::path&, const std::string&)> skipped) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  ScenarioSet set;
  for (const auto& path : files) {
    try {
      auto scenario = parse_scenario(read_file(path));
      const auto report = validate_scenario(scenario);
      if (!report.ok) {
        if (skipped) skipped(path, "fails validation");
        continue;
      }
      const auto id = scenario.id;
      if (!set.emplace(id, std::make_shared<const Scenario>(std::move(scenario))).second) {
        if (skipped) skipped(path, "duplicate scenario id '" + id + "'");
      }
    } catch (const Error& e) {
      if (skipped) skipped(path, e.what());
    }
  }
  return set;
}

LiveConnection::LiveConnection(std::shared_ptr<const ScenarioSet> scenarios, LiveOptions options, Send send)
    : scenarios_(std::move(scenarios)), options_(std::move(options)), send_(std::move(send)) {
  if (!(options_.speed > 0.0) || !std::isfinite(options_.speed)) throw std::invalid_argument("speed must be positive");
}

void LiveConnection::send(std::string_view kind, ordered_json payload) {
  ordered_json message;
  message["kind"] = kind;
  message["tick"] = session_ ? session_->tick() : 0;
  message["payload"] = std::move(payload);
  send_(message);
}

void LiveConnection::protocol_error(std::string_view code, std::string message) {
  send("protocol_error", {{"code", code}, {"message", std::move(message)}});
}

Clock::time_point LiveConnection::deadline_for(std::uint64_t tick) const {
  const double ns = static_cast<double>(tick + 1) * 1e9 * kTickSeconds / options_.speed;
  return started_ + std::chrono::nanoseconds(std::llround(ns));
}

std::optional<Clock::time_point> LiveConnection::next_deadline() const {
  if (!live() || paused()) return std::nullopt;
  return deadline_for(session_->tick());
}

void LiveConnection::advance(Clock::time_point now) {
  while (live() && !paused() && deadline_for(session_->tick()) <= now) step_once();
}

void LiveConnection::disconnect() {
  if (live()) close_session(FinishReason::aborted);
}

void LiveConnection::on_message(std::string_view line, Clock::time_point now) {
  advance(now);

  json message;
  try {
    message = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    return protocol_error("malformed", e.what());
  }
  if (!message.is_object() || !message.contains("kind") || !message["kind"].is_string()) {
    return protocol_error("malformed", "expected an object with a string 'kind'");
  }
  const auto kind = message["kind"].get<std::string>();

  if (kind == "start_level") return start_level(message, now);
  if (kind == "action") return queue_action(message);
  if (kind == "pause") {
    if (!live() || paused()) return protocol_error("invalid_state", "no running session to pause");
    paused_since_ = now;
    return send_snapshot();
  }
  if (kind == "resume") {
    if (!live() || !paused()) return protocol_error("invalid_state", "no paused session to resume");
    started_ += now - *paused_since_;
    paused_since_.reset();
    return send_snapshot();
  }
  if (kind == "abort") {
    if (!live()) return protocol_error("invalid_state", "no running session to abort");
    return close_session(FinishReason::aborted);
  }
  protocol_error("unknown_kind", "unknown message kind '" + kind + "'");
}

void LiveConnection::start_level(const json& message, Clock::time_point now) {
  if (live()) return protocol_error("session_active", "a session is already running on this connection");
  const auto level = message.find("level");
  if (level == message.end() || !level->is_string()) return protocol_error("malformed", "start_level needs a 'level'");
  const auto it = scenarios_->find(level->get<std::string>());
  if (it == scenarios_->end()) return protocol_error("unknown_level", "no level '" + level->get<std::string>() + "'");
  bool start_paused = false;
  if (const auto p = message.find("paused"); p != message.end()) {
    if (!p->is_boolean()) return protocol_error("malformed", "'paused' must be a boolean");
    start_paused = p->get<bool>();
  }

  session_ = std::make_unique<DrillSession>(it->second, options_.seed);
  pending_.clear();
  last_guidance_.reset();
  started_ = now;
  paused_since_ = start_paused ? std::optional(now) : std::nullopt;
  ++sessions_started_;

  send("hello", {{"version", kProtocolVersion},
                 {"engine_version", kEngineVersion},
                 {"level", it->first},
                 {"ticks_per_second", kTicksPerSecond},
                 {"scenario", scenario_to_json(*it->second)}});
  send_snapshot();
  maybe_send_guidance();
}

void LiveConnection::queue_action(const json& message) {
  if (!live()) return protocol_error("no_session", "send start_level first");
  const auto command = message.find("command");
  if (command == message.end()) return protocol_error("malformed", "action needs a 'command'");
  try {
    auto parsed = command_from_json(*command);
    pending_.emplace(parsed.tick, std::move(parsed));
  } catch (const SchemaError& e) {
    protocol_error("malformed", e.what());
  }
}

void LiveConnection::step_once() {
  const std::uint64_t t = session_->tick();
  const std::size_t first = session_->log().size();

  ActionCommand command = ActionCommand::simple(t, CommandKind::wait);
  if (!pending_.empty() && pending_.begin()->first <= t) {
    auto node = pending_.extract(pending_.begin());
    command = std::move(node.mapped());
    if (command.tick < t) {
      session_->note_rebase(command.tick);
      command.tick = t;
    }
  }
  session_->step(command);
  publish(first);

  if (session_->phase() == DrillPhase::complete) return close_session(FinishReason::complete);
  const auto limit = time_limit_ticks(session_->scenario());
  if (limit && session_->tick() >= *limit) close_session(FinishReason::time_limit);
}

void LiveConnection::publish(std::size_t first_event) {
  bool snapshot_sent = false;
  bool fire_sent = false;
  const auto& log = session_->log();
  const auto& catalog = MessageCatalog::builtin();
  for (std::size_t i = first_event; i < log.size(); ++i) {
    const SessionEvent& e = log[i];
    if (e.kind == "cue") {
      send("cue", e.data);
    } else if (e.kind == "phase_changed") {
      send("phase_changed", e.data);
      send_snapshot();
      snapshot_sent = true;
      maybe_send_guidance();
    } else if (e.kind == "error_logged") {
      const auto error = e.data.at("error").get<std::string>();
      send("error_logged", {{"error", error},
                            {"detail", e.data.at("detail")},
                            {"description", catalog.find("error." + error).value_or(error)}});
    } else if (e.kind == "fire_extinguished") {
      send_fire_update();
      fire_sent = true;
    } else if (e.kind == "rejected") {
      const auto reason = e.data.at("reason").get<std::string>();
      send("protocol_error", {{"code", "action_rejected"},
                              {"message", e.data.at("command").get<std::string>() + " rejected: " + reason},
                              {"command", e.data.at("command")},
                              {"reason", reason}});
    }
  }
  if (session_->tick() % kTicksPerSecond == 0) {
    if (!snapshot_sent) send_snapshot();
    if (!fire_sent) send_fire_update();
  }
}

void LiveConnection::send_snapshot() {
  const auto& s = *session_;
  const auto& trainee = s.trainee();
  ordered_json transit = nullptr;
  if (trainee.in_transit) {
    transit = {{"from", trainee.compartment},
               {"toward", trainee.in_transit->toward},
               {"progress", trainee.in_transit->progress()}};
  }
  ordered_json errors = ordered_json::array();
  for (const auto& e : s.errors()) errors.push_back(to_string(e.kind));
  const auto hint = next_required_task(s.phase(), s.scenario().fire, s.scenario().guidance_enabled);
  send("state_snapshot",
       {{"level", s.scenario().id},
        {"phase", to_string(s.phase())},
        {"elapsed_s", s.elapsed_s()},
        {"paused", paused()},
        {"finished", s.finished()},
        {"trainee",
         {{"compartment", trainee.compartment},
          {"in_transit", transit},
          {"carrying_extinguisher", trainee.carrying_extinguisher ? ordered_json(*trainee.carrying_extinguisher)
                                                                   : ordered_json(nullptr)},
          {"applying_agent", trainee.applying_agent}}},
        {"cues", {{"visual", s.perceived_cues().visual}, {"auditory", s.perceived_cues().auditory}}},
        {"fire", {{"compartment", s.fire().spec.compartment},
                  {"intensity", s.fire().intensity},
                  {"status", to_string(s.fire().status)}}},
        {"checklist", checklist_to_json(s.checklist())},
        {"errors", errors},
        {"guidance", hint ? ordered_json(*hint) : ordered_json(nullptr)}});
}

void LiveConnection::send_fire_update() {
  const auto& fire = session_->fire();
  send("fire_update",
       {{"compartment", fire.spec.compartment}, {"intensity", fire.intensity}, {"status", to_string(fire.status)}});
}

void LiveConnection::maybe_send_guidance() {
  const auto& s = *session_;
  auto hint = next_required_task(s.phase(), s.scenario().fire, s.scenario().guidance_enabled);
  if (!hint || hint == last_guidance_) return;
  last_guidance_ = hint;
  send("guidance", {{"phase", to_string(s.phase())}, {"text", *hint}});
}

void LiveConnection::close_session(FinishReason reason) {
  session_->finish(reason);
  pending_.clear();
  paused_since_.reset();

  auto score = score_to_json(score_session(*session_));
  score["reason"] = to_string(reason);
  score["state_hash"] = to_hex(session_->state_hash());
  send("score", std::move(score));

  if (options_.log_dir) {
    std::filesystem::create_directories(*options_.log_dir);
    const auto path = *options_.log_dir / (options_.log_name + "-" + std::to_string(sessions_started_) + "-" +
                                           session_->scenario().id + ".jsonl");
    std::ofstream out(path, std::ios::binary);
    out << to_jsonl(session_->log());
    last_log_ = path;
  }
}

}  // namespace shipdrill
