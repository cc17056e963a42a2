#include "shipdrill/catalog.hpp"

#include <stdexcept>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace embedded {
extern const std::string_view kMessageCatalog;
}

namespace {
std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}
}  // namespace

MessageCatalog MessageCatalog::parse(std::string_view text) {
  MessageCatalog catalog;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const auto raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, 1, "empty key");
    if (!catalog.entries_.emplace(std::string(key), std::string(trim(line.substr(eq + 1)))).second) {
      throw ParseError(line_no, 1, "duplicate key '" + std::string(key) + "'");
    }
  }
  return catalog;
}

const MessageCatalog& MessageCatalog::builtin() {
  static const MessageCatalog catalog = parse(embedded::kMessageCatalog);
  return catalog;
}

std::optional<std::string> MessageCatalog::find(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::string& MessageCatalog::at(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::out_of_range("message catalog has no key '" + std::string(key) + "'");
  return it->second;
}

}  // namespace shipdrill
