#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "afa/error.hpp"

namespace afa::detail {

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Dot,
  Eq,
  Neq,
  Amp,
  Bar,
  Bang,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

/// Splits UTF-8 source into tokens; '#' starts a comment running to the end
/// of the line.
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, const char* what);

  [[noreturn]] void fail(ErrorKind kind, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace afa::detail

namespace afa {
class Signature;
class Term;
namespace detail {

/// Parses one ground term from the stream. Accepts functional notation and,
/// for signatures of single-character symbols, Polish notation.
Term parse_term_tokens(TokenStream& in, const Signature& sig);

/// Parses `fun`/`const` statements until a token that starts neither.
void parse_signature_statement(TokenStream& in, Signature& sig);

}  // namespace detail
}  // namespace afa
