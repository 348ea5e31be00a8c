#include "afa/term.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "afa/error.hpp"
#include "lexer.hpp"

namespace afa {

// ---------------------------------------------------------------- Signature

SymbolId Signature::add(std::string name, int arity) {
  if (by_name_.contains(name)) {
    throw Error(ErrorKind::DuplicateSymbol, "duplicate symbol '" + name + "'");
  }
  auto id = static_cast<SymbolId>(symbols_.size());
  by_name_.emplace(name, id);
  symbols_.push_back({std::move(name), arity});
  return id;
}

SymbolId Signature::add_function(std::string name, int arity) {
  if (arity < 1) {
    throw Error(ErrorKind::Syntax, "function '" + name + "' needs arity >= 1; declare constants with 'const'");
  }
  SymbolId id = add(std::move(name), arity);
  functions_.push_back(id);
  return id;
}

SymbolId Signature::add_constant(std::string name) {
  SymbolId id = add(std::move(name), 0);
  constants_.push_back(id);
  return id;
}

std::optional<SymbolId> Signature::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int Signature::max_arity() const {
  int m = 0;
  for (SymbolId f : functions_) m = std::max(m, arity(f));
  return m;
}

bool Signature::polish_friendly() const {
  return std::all_of(symbols_.begin(), symbols_.end(), [](const Symbol& s) { return s.name.size() == 1; });
}

std::string Signature::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (SymbolId f : functions_) {
    if (!first) out << "; ";
    first = false;
    out << "fun " << name(f) << ' ' << arity(f);
  }
  if (!constants_.empty()) {
    if (!first) out << "; ";
    out << "const";
    for (SymbolId c : constants_) out << ' ' << name(c);
  }
  return out.str();
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.symbols_.size() != b.symbols_.size()) return false;
  for (std::size_t i = 0; i < a.symbols_.size(); ++i) {
    if (a.symbols_[i].name != b.symbols_[i].name || a.symbols_[i].arity != b.symbols_[i].arity) return false;
  }
  return true;
}

// --------------------------------------------------------------------- Term

Term::Term(SymbolId symbol, std::vector<Term> children) {
  std::size_t h = std::hash<int>{}(symbol) * 0x9e3779b97f4a7c15ULL;
  int height = 0;
  std::size_t size = 1;
  for (const Term& c : children) {
    h ^= c.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    height = std::max(height, c.height() + 1);
    size += c.size();
  }
  node_ = std::make_shared<const Node>(Node{symbol, std::move(children), h, height, size});
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.symbol() != b.symbol() || a.size() != b.size()) return false;
  auto ac = a.children();
  auto bc = b.children();
  return std::equal(ac.begin(), ac.end(), bc.begin(), bc.end());
}

// ----------------------------------------------------------------- Parsing

namespace detail {

namespace {

class TermParser {
 public:
  TermParser(TokenStream& in, const Signature& sig) : in_(in), sig_(sig) {}

  Term parse() {
    Term t = parse_one();
    if (!pending_.empty()) {
      in_.fail(ErrorKind::TrailingInput, "trailing input '" + std::string(pending_.begin(), pending_.end()) + "'");
    }
    return t;
  }

 private:
  Term parse_one() {
    if (!pending_.empty()) {
      char c = pending_.front();
      pending_.pop_front();
      SymbolId s = *sig_.find(std::string(1, c));
      std::vector<Term> kids;
      for (int i = 0; i < sig_.arity(s); ++i) {
        if (pending_.empty() && !in_.at(Tok::Ident)) {
          in_.fail(ErrorKind::ArityMismatch, "'" + sig_.name(s) + "' expects " + std::to_string(sig_.arity(s)) + " arguments");
        }
        kids.push_back(parse_one());
      }
      return Term(s, std::move(kids));
    }

    if (!in_.at(Tok::Ident)) in_.fail(ErrorKind::Syntax, "expected a term");
    const Token& tok = in_.peek();
    if (auto s = sig_.find(tok.text)) {
      in_.next();
      int arity = sig_.arity(*s);
      std::vector<Term> kids;
      if (in_.at(Tok::LParen)) {
        if (arity == 0) in_.fail(ErrorKind::ArityMismatch, "constant '" + sig_.name(*s) + "' takes no arguments");
        in_.next();
        kids.push_back(parse());
        while (in_.accept(Tok::Comma)) kids.push_back(parse());
        in_.expect(Tok::RParen, "')'");
        if (static_cast<int>(kids.size()) != arity) {
          throw Error(ErrorKind::ArityMismatch, "'" + sig_.name(*s) + "' expects " + std::to_string(arity) +
                                                    " arguments, got " + std::to_string(kids.size()),
                      tok.line, tok.column);
        }
      } else {
        for (int i = 0; i < arity; ++i) {
          if (!in_.at(Tok::Ident)) {
            throw Error(ErrorKind::ArityMismatch, "'" + sig_.name(*s) + "' expects " + std::to_string(arity) + " arguments",
                        tok.line, tok.column);
          }
          kids.push_back(parse_one());
        }
      }
      return Term(*s, std::move(kids));
    }

    bool polish = sig_.polish_friendly() && std::all_of(tok.text.begin(), tok.text.end(), [&](char c) {
                    return sig_.find(std::string(1, c)).has_value();
                  });
    if (!polish) {
      in_.fail(ErrorKind::UnknownSymbol, "unknown symbol '" + tok.text + "'");
    }
    pending_.assign(tok.text.begin(), tok.text.end());
    in_.next();
    return parse_one();
  }

  TokenStream& in_;
  const Signature& sig_;
  std::deque<char> pending_;
};

}  // namespace

Term parse_term_tokens(TokenStream& in, const Signature& sig) { return TermParser(in, sig).parse(); }

void parse_signature_statement(TokenStream& in, Signature& sig) {
  const Token& kw = in.peek();
  if (kw.text == "fun") {
    in.next();
    const Token& name = in.expect(Tok::Ident, "function name");
    const Token& ar = in.expect(Tok::Int, "arity");
    int arity = std::stoi(ar.text);
    if (arity < 1) {
      throw Error(ErrorKind::Syntax, "function '" + name.text + "' needs arity >= 1", ar.line, ar.column);
    }
    try {
      sig.add_function(name.text, arity);
    } catch (const Error& e) {
      throw Error(e.kind(), e.what(), name.line, name.column);
    }
  } else if (kw.text == "const") {
    in.next();
    if (!in.at(Tok::Ident)) in.fail(ErrorKind::Syntax, "expected constant name");
    while (in.at(Tok::Ident)) {
      const Token& name = in.next();
      try {
        sig.add_constant(name.text);
      } catch (const Error& e) {
        throw Error(e.kind(), e.what(), name.line, name.column);
      }
    }
  } else {
    in.fail(ErrorKind::Syntax, "expected 'fun' or 'const'");
  }
}

}  // namespace detail

Signature parse_signature(std::string_view text) {
  detail::TokenStream in(detail::tokenize(text));
  Signature sig;
  while (!in.at(detail::Tok::End)) {
    if (in.accept(detail::Tok::Semi)) continue;
    detail::parse_signature_statement(in, sig);
    if (!in.at(detail::Tok::End)) in.expect(detail::Tok::Semi, "';'");
  }
  if (sig.constants().empty()) throw Error(ErrorKind::NoConstant, "signature declares no constant");
  return sig;
}

Term parse_term(std::string_view text, const Signature& sig) {
  detail::TokenStream in(detail::tokenize(text));
  Term t = detail::parse_term_tokens(in, sig);
  if (!in.at(detail::Tok::End)) in.fail(ErrorKind::TrailingInput, "trailing input '" + in.peek().text + "'");
  return t;
}

void check_well_formed(const Term& t, const Signature& sig) {
  if (t.symbol() < 0 || static_cast<std::size_t>(t.symbol()) >= sig.symbol_count()) {
    throw Error(ErrorKind::UnknownSymbol, "symbol id " + std::to_string(t.symbol()) + " not in signature");
  }
  if (static_cast<int>(t.arity()) != sig.arity(t.symbol())) {
    throw Error(ErrorKind::ArityMismatch, "'" + sig.name(t.symbol()) + "' applied to wrong number of arguments");
  }
  for (const Term& c : t.children()) check_well_formed(c, sig);
}

// ------------------------------------------------------------ Positions

std::string format_position(const Position& pos, int max_arity) {
  if (pos.empty()) return "e";
  std::string out;
  bool digits = max_arity <= 10;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (!digits && i > 0) out += '-';
    out += std::to_string(pos[i]);
  }
  return out;
}

Position parse_position(std::string_view text, int max_arity) {
  Position pos;
  if (text.empty() || text == "e") return pos;
  if (max_arity <= 10) {
    for (char c : text) {
      if (c < '0' || c > '9') throw Error(ErrorKind::Syntax, "bad position '" + std::string(text) + "'");
      pos.push_back(c - '0');
    }
    return pos;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t dash = text.find('-', start);
    std::string part(text.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start));
    if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
      throw Error(ErrorKind::Syntax, "bad position '" + std::string(text) + "'");
    }
    pos.push_back(std::stoi(part));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return pos;
}

// ------------------------------------------------------- Tree structure

namespace {

void collect_tree(const Term& t, Position& at, TreeRepresentation& out) {
  out.emplace(at, t.symbol());
  for (std::size_t i = 0; i < t.arity(); ++i) {
    at.push_back(static_cast<int>(i));
    collect_tree(t.child(i), at, out);
    at.pop_back();
  }
}

void collect_positions(const Term& t, Position& at, std::vector<Position>& out) {
  out.push_back(at);
  for (std::size_t i = 0; i < t.arity(); ++i) {
    at.push_back(static_cast<int>(i));
    collect_positions(t.child(i), at, out);
    at.pop_back();
  }
}

Term build_from_tree(const TreeRepresentation& tree, const Signature& sig, Position& at) {
  auto it = tree.find(at);
  if (it == tree.end()) throw Error(ErrorKind::InvalidPosition, "tree has no node at required position");
  std::vector<Term> kids;
  for (int i = 0; i < sig.arity(it->second); ++i) {
    at.push_back(i);
    kids.push_back(build_from_tree(tree, sig, at));
    at.pop_back();
  }
  return Term(it->second, std::move(kids));
}

}  // namespace

TreeRepresentation tree_of(const Term& t) {
  TreeRepresentation out;
  Position at;
  collect_tree(t, at, out);
  return out;
}

Term term_of_tree(const TreeRepresentation& tree, const Signature& sig) {
  Position at;
  Term t = build_from_tree(tree, sig, at);
  if (t.size() != tree.size()) throw Error(ErrorKind::InvalidPosition, "tree has nodes outside the term");
  return t;
}

Term subterm_at(const Term& t, const Position& pos) {
  const Term* cur = &t;
  for (int i : pos) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->arity()) {
      throw Error(ErrorKind::InvalidPosition, "position does not exist in term");
    }
    cur = &cur->child(static_cast<std::size_t>(i));
  }
  return *cur;
}

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position at;
  collect_positions(t, at, out);
  return out;
}

// ---------------------------------------------------------------- Printing

namespace {

void print_functional(const Term& t, const Signature& sig, std::string& out) {
  out += sig.name(t.symbol());
  if (t.is_constant()) return;
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i > 0) out += ',';
    print_functional(t.child(i), sig, out);
  }
  out += ')';
}

void print_polish(const Term& t, const Signature& sig, std::string& out) {
  out += sig.name(t.symbol());
  for (const Term& c : t.children()) print_polish(c, sig, out);
}

}  // namespace

std::string to_string(const Term& t, const Signature& sig) {
  std::string out;
  print_functional(t, sig, out);
  return out;
}

std::string to_polish(const Term& t, const Signature& sig) {
  std::string out;
  print_polish(t, sig, out);
  return out;
}

std::strong_ordering compare_terms(const Term& a, const Term& b, const Signature& sig) {
  if (a == b) return std::strong_ordering::equal;
  if (auto c = a.height() <=> b.height(); c != 0) return c;
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return to_string(a, sig) <=> to_string(b, sig);
}

std::vector<Term> subterms(const Term& t) {
  std::vector<Term> out;
  std::unordered_set<Term> seen;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term cur = stack.back();
    stack.pop_back();
    if (!seen.insert(cur).second) continue;
    out.push_back(cur);
    for (const Term& c : cur.children()) stack.push_back(c);
  }
  return out;
}

std::vector<Term> enumerate_terms(const Signature& sig, int max_height, std::size_t limit) {
  std::vector<Term> all;
  for (SymbolId c : sig.constants()) all.push_back(Term::constant(c));
  std::size_t prev_end = 0;
  for (int h = 1; h <= max_height; ++h) {
    std::size_t level_start = prev_end;
    prev_end = all.size();
    std::vector<Term> fresh;
    for (SymbolId f : sig.functions()) {
      int k = sig.arity(f);
      // Tuples over all terms so far with at least one child of height h-1.
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      std::size_t n = prev_end;
      while (true) {
        bool tall = std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= level_start; });
        if (tall) {
          std::vector<Term> kids;
          for (std::size_t i : idx) kids.push_back(all[i]);
          fresh.emplace_back(f, std::move(kids));
          if (all.size() + fresh.size() > limit) {
            throw Error(ErrorKind::BudgetExhausted, "term enumeration exceeds limit");
          }
        }
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == n) idx[d++] = 0;
        if (d == idx.size()) break;
      }
    }
    all.insert(all.end(), fresh.begin(), fresh.end());
  }
  return all;
}

}  // namespace afa
