#pragma once

#include <stdexcept>
#include <string>

namespace cookplan {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Position inside a text input, 1-based.
struct SourcePos {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

inline std::string to_string(const SourcePos& pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

/// Malformed textual input (PDDL, DSL, scenario, CSV ...).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : Error(to_string(pos) + ": " + message), pos_(pos), message_(message) {}
  explicit ParseError(const std::string& message) : Error(message), message_(message) {}

  SourcePos position() const noexcept { return pos_; }
  const std::string& bare_message() const noexcept { return message_; }

 private:
  SourcePos pos_{0, 0};
  std::string message_;
};

/// Well-formed input that violates a semantic rule (undeclared type, bad arity ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace cookplan
