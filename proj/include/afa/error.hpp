#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afa {

enum class ErrorKind {
  Syntax,
  UnknownSymbol,
  DuplicateSymbol,
  NoConstant,
  ArityMismatch,
  TrailingInput,
  InvalidPosition,
  SignatureMismatch,
  UnboundVariable,
  UnassignedVariable,
  NotFinite,
  BudgetExhausted,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// to an exit code and a JSON error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  Error(ErrorKind kind, const std::string& message, std::size_t line, std::size_t column);

  ErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  ErrorKind kind_;
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

}  // namespace afa
