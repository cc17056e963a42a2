#include <cmath>
#include <map>

#include "shipdrill/errors.hpp"
#include "shipdrill/runner.hpp"

namespace shipdrill {

namespace {

std::shared_ptr<const Scenario> share(const Scenario& scenario) { return std::make_shared<const Scenario>(scenario); }

bool out_of_time(const DrillSession& session, std::optional<std::uint64_t> limit) {
  return limit && session.tick() >= *limit;
}

// Finishes the session if it has completed or run out of time.
bool stop_if_done(DrillSession& session, std::optional<std::uint64_t> limit) {
  if (session.phase() == DrillPhase::complete) {
    session.finish(FinishReason::complete);
    return true;
  }
  if (out_of_time(session, limit)) {
    session.finish(FinishReason::time_limit);
    return true;
  }
  return false;
}

struct Recorded {
  std::vector<std::uint64_t> rebases;
  std::optional<ActionCommand> command;
};

std::uint64_t divergence_tick(std::span<const SessionEvent> original, std::span<const SessionEvent> regenerated) {
  const std::size_t n = std::min(original.size(), regenerated.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (to_json_line(original[i]) != to_json_line(regenerated[i])) {
      return std::min(original[i].tick, regenerated[i].tick);
    }
  }
  if (original.size() > n) return original[n].tick;
  if (regenerated.size() > n) return regenerated[n].tick;
  return original.empty() ? 0 : original.back().tick;
}

}  // namespace

std::optional<std::uint64_t> time_limit_ticks(const Scenario& scenario) {
  if (!scenario.time_limit_s) return std::nullopt;
  return static_cast<std::uint64_t>(std::ceil(*scenario.time_limit_s * kTicksPerSecond - 1e-9));
}

RunResult run_script(std::shared_ptr<const Scenario> scenario, std::span<const ActionCommand> commands,
                     std::uint64_t seed) {
  DrillSession session = new_session(scenario, seed);
  const auto limit = time_limit_ticks(*scenario);

  const auto result = [&]() {
    ScoreReport score = score_session(session);
    return RunResult{std::move(session), std::move(score)};
  };

  for (const auto& command : commands) {
    if (command.tick < session.tick()) throw TickMismatch(session.tick(), command.tick);
    while (session.tick() < command.tick) {
      if (stop_if_done(session, limit)) return result();
      session.step(ActionCommand::simple(session.tick(), CommandKind::wait));
    }
    if (stop_if_done(session, limit)) return result();
    session.step(command);
  }
  if (!stop_if_done(session, limit)) session.finish(FinishReason::commands_exhausted);
  return result();
}

RunResult run_script(const Scenario& scenario, std::span<const ActionCommand> commands, std::uint64_t seed) {
  return run_script(share(scenario), commands, seed);
}

DrillSession replay(std::span<const SessionEvent> log, std::shared_ptr<const Scenario> scenario) {
  if (log.empty()) throw IncompatibleLog("empty log");
  const auto& first = log.front();
  if (first.kind != "session_started") throw IncompatibleLog("first event is not session_started");
  const auto& last = log.back();
  if (last.kind != "session_finished") throw IncompatibleLog("last event is not session_finished");

  std::uint64_t seed = 0;
  std::uint64_t total_ticks = 0;
  FinishReason reason = FinishReason::commands_exhausted;
  std::map<std::uint64_t, Recorded> by_tick;
  try {
    const auto version = first.data.at("engine_version").get<std::string>();
    if (version != kEngineVersion) {
      throw IncompatibleLog("log written by engine version " + version + ", this is " + std::string(kEngineVersion));
    }
    const auto scenario_id = first.data.at("scenario_id").get<std::string>();
    if (scenario_id != scenario->id) {
      throw IncompatibleLog("log is for scenario '" + scenario_id + "', not '" + scenario->id + "'");
    }
    seed = first.data.at("seed").get<std::uint64_t>();
    total_ticks = last.data.at("total_ticks").get<std::uint64_t>();
    const auto parsed = parse_finish_reason(last.data.at("reason").get<std::string>());
    if (!parsed) throw IncompatibleLog("unknown finish reason");
    reason = *parsed;

    for (const auto& e : log) {
      if (e.kind == "rebase") {
        by_tick[e.tick].rebases.push_back(e.data.at("requested_tick").get<std::uint64_t>());
      } else if (e.kind == "command") {
        auto command = command_from_json(e.data);
        if (command.tick != e.tick) throw ReplayDivergence(e.tick);
        auto& slot = by_tick[e.tick].command;
        if (slot) throw ReplayDivergence(e.tick);
        slot = std::move(command);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleLog(std::string("malformed log: ") + e.what());
  } catch (const SchemaError& e) {
    throw IncompatibleLog(std::string("malformed log: ") + e.what());
  }

  DrillSession session(std::move(scenario), seed);
  try {
    for (std::uint64_t t = 0; t < total_ticks; ++t) {
      const auto it = by_tick.find(t);
      if (it == by_tick.end()) {
        session.step(ActionCommand::simple(t, CommandKind::wait));
        continue;
      }
      for (const auto requested : it->second.rebases) session.note_rebase(requested);
      session.step(it->second.command ? *it->second.command : ActionCommand::simple(t, CommandKind::wait));
    }
    session.finish(reason);
  } catch (const ReplayDivergence&) {
    throw;
  } catch (const Error&) {
    throw ReplayDivergence(divergence_tick(log, session.log()));
  }

  if (to_jsonl(log) != to_jsonl(session.log())) throw ReplayDivergence(divergence_tick(log, session.log()));
  if (last.data.value("state_hash", std::string{}) != to_hex(session.state_hash())) {
    throw ReplayDivergence(session.tick());
  }
  return session;
}

DrillSession replay(std::string_view log_text, std::shared_ptr<const Scenario> scenario) {
  std::vector<SessionEvent> events;
  try {
    events = parse_event_log(log_text);
  } catch (const ParseError& e) {
    throw IncompatibleLog(std::string("malformed log: ") + e.what());
  } catch (const SchemaError& e) {
    throw IncompatibleLog(std::string("malformed log: ") + e.what());
  }
  DrillSession session = replay(events, std::move(scenario));

  // Valid JSON is not enough: the bytes must be exactly what the engine writes.
  const std::string expected = to_jsonl(session.log());
  if (log_text != expected) {
    std::size_t line = 0;
    const std::size_t n = std::min(log_text.size(), expected.size());
    for (std::size_t i = 0; i < n && log_text[i] == expected[i]; ++i) {
      if (expected[i] == '\n') ++line;
    }
    const auto& log = session.log();
    throw ReplayDivergence(line < log.size() ? log[line].tick : session.tick());
  }
  return session;
}

}  // namespace shipdrill
