#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "shipdrill/engine.hpp"
#include "shipdrill/scenario.hpp"

namespace shipdrill {

inline constexpr std::string_view kProtocolVersion = "1";

using Clock = std::chrono::steady_clock;

/// Scenarios a server offers, keyed by id. Immutable once built and shared
/// by every connection.
using ScenarioSet = std::map<std::string, std::shared_ptr<const Scenario>, std::less<>>;

ScenarioSet builtin_scenario_set();
/// Every *.json in `dir` that parses and validates. Files that do not are
/// reported through `skipped` (path, reason) when given.
ScenarioSet load_scenario_dir(const std::filesystem::path& dir,
                              std::function<void(const std::filesystem::path&, const std::string&)> skipped = {});

struct LiveOptions {
  /// Simulated seconds per wall second.
  double speed = 1.0;
  std::uint64_t seed = 0;
  /// Finished session logs are written here when set.
  std::optional<std::filesystem::path> log_dir;
  /// Prefix for log file names, unique per connection.
  std::string log_name = "session";
};

/// One client connection's view of the drill: decodes client messages,
/// paces the session against a clock and produces server messages.
///
/// The transport feeds it lines and wall-clock instants; nothing here reads
/// a clock or touches a socket, so tests drive it with synthetic time.
class LiveConnection {
 public:
  using Send = std::function<void(const nlohmann::ordered_json&)>;

  LiveConnection(std::shared_ptr<const ScenarioSet> scenarios, LiveOptions options, Send send);

  /// Handles one NDJSON client message received at `now`.
  void on_message(std::string_view line, Clock::time_point now);
  /// Steps every tick whose deadline has passed.
  void advance(Clock::time_point now);
  /// When the next tick is due, or nullopt when no session is running.
  std::optional<Clock::time_point> next_deadline() const;
  /// The client went away: a running session is closed as aborted.
  void disconnect();

  bool has_session() const noexcept { return session_ != nullptr; }
  bool live() const noexcept { return session_ && !session_->finished(); }
  bool paused() const noexcept { return paused_since_.has_value(); }
  const DrillSession* session() const noexcept { return session_.get(); }
  std::size_t pending_actions() const noexcept { return pending_.size(); }
  /// Path of the last log written, if any.
  const std::optional<std::filesystem::path>& last_log_path() const noexcept { return last_log_; }

 private:
  void send(std::string_view kind, nlohmann::ordered_json payload);
  void protocol_error(std::string_view code, std::string message);
  void start_level(const nlohmann::json& message, Clock::time_point now);
  void queue_action(const nlohmann::json& message);
  void step_once();
  void publish(std::size_t first_event);
  void send_snapshot();
  void send_fire_update();
  void maybe_send_guidance();
  void close_session(FinishReason reason);
  Clock::time_point deadline_for(std::uint64_t tick) const;

  std::shared_ptr<const ScenarioSet> scenarios_;
  LiveOptions options_;
  Send send_;
  std::unique_ptr<DrillSession> session_;
  std::multimap<std::uint64_t, ActionCommand> pending_;
  Clock::time_point started_{};
  std::optional<Clock::time_point> paused_since_;
  std::optional<std::string> last_guidance_;
  std::optional<std::filesystem::path> last_log_;
  unsigned sessions_started_ = 0;
};

}  // namespace shipdrill
