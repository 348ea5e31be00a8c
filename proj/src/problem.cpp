#include "afa/problem.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "afa/error.hpp"
#include "lexer.hpp"

namespace afa {

std::vector<Term> EquationSet::sides() const {
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  for (const Equation& e : eqs_) {
    if (seen.insert(e.lhs).second) out.push_back(e.lhs);
    if (seen.insert(e.rhs).second) out.push_back(e.rhs);
  }
  return out;
}

int EquationSet::max_height() const {
  int h = 0;
  for (const Equation& e : eqs_) h = std::max({h, e.lhs.height(), e.rhs.height()});
  return h;
}

Problem parse_problem(std::string_view text) {
  using detail::Tok;
  detail::TokenStream in(detail::tokenize(text));
  Problem p;
  bool seen_eq = false;
  while (!in.at(Tok::End)) {
    if (in.accept(Tok::Semi)) continue;
    const detail::Token& kw = in.peek();
    if (kw.kind == Tok::Ident && kw.text == "eq") {
      in.next();
      if (!seen_eq && p.signature.constants().empty()) {
        throw Error(ErrorKind::NoConstant, "signature declares no constant", kw.line, kw.column);
      }
      seen_eq = true;
      Term lhs = detail::parse_term_tokens(in, p.signature);
      in.expect(Tok::Eq, "'='");
      Term rhs = detail::parse_term_tokens(in, p.signature);
      p.equations.add(std::move(lhs), std::move(rhs));
    } else if (kw.kind == Tok::Ident && (kw.text == "fun" || kw.text == "const")) {
      if (seen_eq) in.fail(ErrorKind::Syntax, "symbol declarations must precede equations");
      detail::parse_signature_statement(in, p.signature);
    } else {
      in.fail(ErrorKind::Syntax, "expected 'fun', 'const' or 'eq'");
    }
    if (!in.at(Tok::End)) in.expect(Tok::Semi, "';'");
  }
  if (p.signature.constants().empty()) throw Error(ErrorKind::NoConstant, "signature declares no constant");
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_problem(buf.str());
}

std::string to_string(const Problem& p) {
  std::string out = p.signature.to_string() + ";\n";
  for (const Equation& e : p.equations) {
    out += "eq " + to_string(e.lhs, p.signature) + " = " + to_string(e.rhs, p.signature) + ";\n";
  }
  return out;
}

}  // namespace afa
