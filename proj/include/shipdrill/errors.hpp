#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shipdrill {

/// Base of every exception the engine throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownCompartment : public Error {
 public:
  explicit UnknownCompartment(const std::string& id)
      : Error("unknown compartment '" + id + "'"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class NoEscapeRoute : public Error {
 public:
  explicit NoEscapeRoute(const std::string& from)
      : Error("no signed escape route from '" + from + "' to a muster area"), from_(from) {}
  const std::string& from() const noexcept { return from_; }

 private:
  std::string from_;
};

class FireAlreadyOut : public Error {
 public:
  FireAlreadyOut() : Error("fire is already extinguished") {}
};

class InvalidEvent : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : Error("schema error in '" + field + "': " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ReferenceError : public Error {
 public:
  ReferenceError(const std::string& field, const std::string& id)
      : Error("dangling reference in '" + field + "': '" + id + "'"), field_(field), id_(id) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& id() const noexcept { return id_; }

 private:
  std::string field_;
  std::string id_;
};

class TickMismatch : public Error {
 public:
  TickMismatch(std::uint64_t expected, std::uint64_t got)
      : Error("command tick " + std::to_string(got) + " does not match session tick " +
              std::to_string(expected)),
        expected_(expected),
        got_(got) {}
  std::uint64_t expected() const noexcept { return expected_; }
  std::uint64_t got() const noexcept { return got_; }

 private:
  std::uint64_t expected_;
  std::uint64_t got_;
};

class ReplayDivergence : public Error {
 public:
  explicit ReplayDivergence(std::uint64_t tick)
      : Error("replay diverged at tick " + std::to_string(tick)), tick_(tick) {}
  std::uint64_t tick() const noexcept { return tick_; }

 private:
  std::uint64_t tick_;
};

class IncompatibleLog : public Error {
 public:
  using Error::Error;
};

class SessionStillOpen : public Error {
 public:
  SessionStillOpen() : Error("session has no session_finished event") {}
};

class MissingReference : public Error {
 public:
  explicit MissingReference(const std::string& level)
      : Error("reference tester has no time for level '" + level + "'"), level_(level) {}
  const std::string& level() const noexcept { return level_; }

 private:
  std::string level_;
};

}  // namespace shipdrill
