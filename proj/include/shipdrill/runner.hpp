#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "shipdrill/engine.hpp"
#include "shipdrill/scoring.hpp"

namespace shipdrill {

struct RunResult {
  DrillSession session;
  ScoreReport score;
};

/// First tick at which a session with this limit is out of time.
std::optional<std::uint64_t> time_limit_ticks(const Scenario& scenario);

/// Steps the commands in order, padding gaps with waits. Finishes with
/// `complete`, `time_limit` or `commands_exhausted`, whichever comes first.
/// Throws TickMismatch when a command's tick is behind the session.
RunResult run_script(std::shared_ptr<const Scenario> scenario, std::span<const ActionCommand> commands,
                     std::uint64_t seed);
RunResult run_script(const Scenario& scenario, std::span<const ActionCommand> commands, std::uint64_t seed);

/// Re-executes the commands and rebase notes recorded in `log` and checks
/// that the regenerated log is identical. Throws IncompatibleLog when the log
/// was not written by this engine version for this scenario, and
/// ReplayDivergence with the first tick that differs.
DrillSession replay(std::span<const SessionEvent> log, std::shared_ptr<const Scenario> scenario);
/// Same, from JSONL text. The text itself must match byte for byte.
DrillSession replay(std::string_view log_text, std::shared_ptr<const Scenario> scenario);

}  // namespace shipdrill
