#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace shipdrill {

/// One line of a session log. Events are totally ordered by (tick, seq);
/// `seq` counts from 0 across the whole session.
struct SessionEvent {
  std::uint64_t tick = 0;
  std::uint64_t seq = 0;
  std::string kind;
  nlohmann::json data = nlohmann::json::object();

  bool operator==(const SessionEvent&) const = default;
};

/// Compact single-line JSON: {"tick":..,"seq":..,"kind":"..","data":{..}}.
/// Object keys inside `data` are emitted in sorted order, so equal events
/// always serialize to the same bytes.
std::string to_json_line(const SessionEvent& event);
std::string to_jsonl(std::span<const SessionEvent> events);

/// Strict: exactly the four keys above. Throws ParseError / SchemaError.
SessionEvent parse_event_line(std::string_view line, std::size_t line_no = 1);
std::vector<SessionEvent> parse_event_log(std::string_view text);

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;

/// 64-bit FNV-1a. Pass a previous result as `hash` to continue a digest.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = kFnvOffsetBasis);
std::string to_hex(std::uint64_t value);

}  // namespace shipdrill
