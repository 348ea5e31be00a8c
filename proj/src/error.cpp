#include "afa/error.hpp"

namespace afa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UnknownSymbol: return "unknown-symbol";
    case ErrorKind::DuplicateSymbol: return "duplicate-symbol";
    case ErrorKind::NoConstant: return "no-constant";
    case ErrorKind::ArityMismatch: return "arity-mismatch";
    case ErrorKind::TrailingInput: return "trailing-input";
    case ErrorKind::InvalidPosition: return "invalid-position";
    case ErrorKind::SignatureMismatch: return "signature-mismatch";
    case ErrorKind::UnboundVariable: return "unbound-variable";
    case ErrorKind::UnassignedVariable: return "unassigned-variable";
    case ErrorKind::NotFinite: return "not-finite";
    case ErrorKind::BudgetExhausted: return "budget-exhausted";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(message + " at " + std::to_string(line) + ":" + std::to_string(column)),
      kind_(kind),
      line_(line),
      column_(column) {}

}  // namespace afa
