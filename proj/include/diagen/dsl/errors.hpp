#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diagen::dsl {

/// 1-based line/column into the normalized (LF) source text.
struct SourcePos {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class ErrorKind {
  Syntax,
  DuplicateName,
  UndeclaredType,
  UndeclaredIdentifier,
  UnknownPredicate,
  UnknownFunction,
  ArityMismatch,
  TypeMismatch,
  CyclicSubtype,
  UnknownShape,
  UnknownProperty,
  UnknownConstraint,
  UnknownObjective,
  InvalidCanvas,
};

std::string_view to_string(ErrorKind kind);

/// Error raised by every parser in this module. `what()` is formatted as
/// `<line>:<column>: <kind>: <message>`.
class ParseError : public std::runtime_error {
 public:
  ParseError(ErrorKind kind, SourcePos pos, std::string message);

  ErrorKind kind() const noexcept { return kind_; }
  SourcePos pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string message_;
};

}  // namespace diagen::dsl
