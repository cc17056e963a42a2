#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "shipdrill/live_session.hpp"

namespace shipdrill {

struct ServerOptions {
  std::string bind = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  double speed = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> log_dir;
  /// Diagnostics (connections, socket errors). Silent when empty.
  std::function<void(const std::string&)> log;
};

/// Drill session server. Each accepted connection gets its own
/// LiveConnection. A connection whose first bytes are an HTTP GET is upgraded
/// to a WebSocket carrying one JSON message per text frame; anything else is
/// read as newline-delimited JSON.
///
/// All connections share one I/O thread; pacing uses per-connection timers.
class Server {
 public:
  Server(ScenarioSet scenarios, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Throws Error if the address is unusable.
  void start();
  /// Port actually bound; valid after start().
  std::uint16_t port() const;
  /// Runs the I/O loop until stop().
  void run();
  /// Safe from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shipdrill
