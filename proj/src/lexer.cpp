#include "lexer.hpp"

#include <cctype>

namespace afa::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto push = [&](Tok kind, std::size_t len) {
    out.push_back({kind, std::string(text.substr(i, len)), line, col});
    i += len;
    col += len;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Tok::Int, j - i);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      case '=': push(Tok::Eq, 1); continue;
      case '&': push(Tok::Amp, 1); continue;
      case '|': push(Tok::Bar, 1); continue;
      case '!':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          push(Tok::Neq, 2);
        } else {
          push(Tok::Bang, 1);
        }
        continue;
      default:
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const Token& TokenStream::expect(Tok kind, const char* what) {
  if (!at(kind)) {
    fail(ErrorKind::Syntax, std::string("expected ") + what +
                                (peek().kind == Tok::End ? ", found end of input"
                                                         : ", found '" + peek().text + "'"));
  }
  return next();
}

void TokenStream::fail(ErrorKind kind, const std::string& message) const {
  throw Error(kind, message, peek().line, peek().column);
}

}  // namespace afa::detail
