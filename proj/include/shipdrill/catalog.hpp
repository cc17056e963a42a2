#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace shipdrill {

/// Key/value text strings shared by the CLI, the server and the trainer UI.
///
/// Format: one `key = value` per line; blank lines and lines starting with
/// `#` are ignored. Keys are unique.
class MessageCatalog {
 public:
  /// Throws ParseError on malformed lines or duplicate keys.
  static MessageCatalog parse(std::string_view text);
  /// The catalog shipped in data/messages.txt.
  static const MessageCatalog& builtin();

  std::optional<std::string> find(std::string_view key) const;
  /// Throws std::out_of_range for a missing key.
  const std::string& at(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace shipdrill
