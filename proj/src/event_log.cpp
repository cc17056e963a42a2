#include "shipdrill/event_log.hpp"

#include <cstdio>

#include "shipdrill/errors.hpp"

namespace shipdrill {

std::string to_json_line(const SessionEvent& event) {
  nlohmann::ordered_json line;
  line["tick"] = event.tick;
  line["seq"] = event.seq;
  line["kind"] = event.kind;
  line["data"] = event.data;
  return line.dump();
}

std::string to_jsonl(std::span<const SessionEvent> events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json_line(e);
    out += '\n';
  }
  return out;
}

SessionEvent parse_event_line(std::string_view line, std::size_t line_no) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, e.byte, e.what());
  }
  const std::string where = "line " + std::to_string(line_no);
  if (!doc.is_object()) throw SchemaError(where, "expected an object");
  if (doc.size() != 4) throw SchemaError(where, "expected exactly tick, seq, kind and data");
  const auto tick = doc.find("tick");
  const auto seq = doc.find("seq");
  const auto kind = doc.find("kind");
  const auto data = doc.find("data");
  if (tick == doc.end() || !tick->is_number_unsigned()) throw SchemaError(where + ".tick", "expected an unsigned integer");
  if (seq == doc.end() || !seq->is_number_unsigned()) throw SchemaError(where + ".seq", "expected an unsigned integer");
  if (kind == doc.end() || !kind->is_string()) throw SchemaError(where + ".kind", "expected a string");
  if (data == doc.end() || !data->is_object()) throw SchemaError(where + ".data", "expected an object");
  return {tick->get<std::uint64_t>(), seq->get<std::uint64_t>(), kind->get<std::string>(), *data};
}

std::vector<SessionEvent> parse_event_log(std::string_view text) {
  std::vector<SessionEvent> events;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() && text.empty()) break;
    events.push_back(parse_event_line(line, line_no));
  }
  return events;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) {
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace shipdrill
