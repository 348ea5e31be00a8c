#include "afa/formula.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "afa/error.hpp"
#include "lexer.hpp"

namespace afa {

namespace {

std::size_t mix(std::size_t h, std::size_t x) { return h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

std::size_t str_hash(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

// ---------------------------------------------------------------- OpenTerm

OpenTerm OpenTerm::var(std::string name) {
  Node n{Kind::Var, std::move(name)};
  n.vars = {n.name};
  n.hash = mix(0x1badb002, str_hash(n.name));
  OpenTerm t;
  t.node_ = std::make_shared<const Node>(std::move(n));
  return t;
}

OpenTerm OpenTerm::elem(ElementId e) {
  Node n{Kind::Elem};
  n.element = e;
  n.hash = mix(0x51ed27, static_cast<std::size_t>(e));
  OpenTerm t;
  t.node_ = std::make_shared<const Node>(std::move(n));
  return t;
}

OpenTerm OpenTerm::raw_app(SymbolId f, std::vector<OpenTerm> args) {
  Node n{Kind::App};
  n.symbol = f;
  n.hash = mix(0x2545f491, static_cast<std::size_t>(f));
  for (const OpenTerm& a : args) {
    n.hash = mix(n.hash, a.hash());
    n.size += a.size();
    for (const std::string& v : a.vars()) {
      if (std::find(n.vars.begin(), n.vars.end(), v) == n.vars.end()) n.vars.push_back(v);
    }
  }
  n.args = std::move(args);
  OpenTerm t;
  t.node_ = std::make_shared<const Node>(std::move(n));
  return t;
}

OpenTerm OpenTerm::app(const PartialAlgebra& b, SymbolId f, std::vector<OpenTerm> args) {
  if (static_cast<int>(args.size()) != b.signature().arity(f)) {
    throw Error(ErrorKind::ArityMismatch, "'" + b.signature().name(f) + "' expects " +
                                              std::to_string(b.signature().arity(f)) + " arguments");
  }
  if (std::all_of(args.begin(), args.end(), [](const OpenTerm& a) { return a.is_elem(); })) {
    std::vector<ElementId> ids;
    for (const OpenTerm& a : args) ids.push_back(a.element());
    if (auto v = b.op(f, ids)) return elem(*v);
  }
  return raw_app(f, std::move(args));
}

bool OpenTerm::contains(const std::string& v) const {
  return std::find(node_->vars.begin(), node_->vars.end(), v) != node_->vars.end();
}

bool operator==(const OpenTerm& a, const OpenTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case OpenTerm::Kind::Var: return a.name() == b.name();
    case OpenTerm::Kind::Elem: return a.element() == b.element();
    case OpenTerm::Kind::App: break;
  }
  if (a.symbol() != b.symbol()) return false;
  auto x = a.args();
  auto y = b.args();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

OpenTerm substitute(const PartialAlgebra& b, const OpenTerm& t, const std::string& v, const OpenTerm& by) {
  if (!t.contains(v)) return t;
  if (t.is_var()) return by;
  std::vector<OpenTerm> args;
  for (const OpenTerm& a : t.args()) args.push_back(substitute(b, a, v, by));
  return OpenTerm::app(b, t.symbol(), std::move(args));
}

// ----------------------------------------------------------------- Formula

Formula Formula::make(Node n) {
  std::size_t h = mix(0x7f4a7c15, static_cast<std::size_t>(n.kind));
  h = mix(h, static_cast<std::size_t>(n.symbol + 1));
  std::vector<std::string> free;
  for (const OpenTerm& t : n.terms) {
    h = mix(h, t.hash());
    free.insert(free.end(), t.vars().begin(), t.vars().end());
  }
  for (const Formula& p : n.parts) {
    h = mix(h, p.hash());
    free.insert(free.end(), p.free().begin(), p.free().end());
  }
  for (const std::string& v : n.bound) h = mix(h, str_hash(v));
  std::sort(free.begin(), free.end());
  free.erase(std::unique(free.begin(), free.end()), free.end());
  if (!n.bound.empty()) {
    std::erase_if(free, [&](const std::string& v) {
      return std::find(n.bound.begin(), n.bound.end(), v) != n.bound.end();
    });
  }
  n.free = std::move(free);
  n.hash = h;
  Formula f;
  f.node_ = std::make_shared<const Node>(std::move(n));
  return f;
}

Formula Formula::truth(bool value) {
  static const Formula t = make(Node{FormulaKind::True});
  static const Formula f = make(Node{FormulaKind::False});
  return value ? t : f;
}

Formula Formula::eq(OpenTerm s, OpenTerm t) { return make(Node{FormulaKind::Eq, {std::move(s), std::move(t)}}); }

Formula Formula::neq(OpenTerm s, OpenTerm t) { return make(Node{FormulaKind::Neq, {std::move(s), std::move(t)}}); }

Formula Formula::is(SymbolId f, OpenTerm t) { return make(Node{FormulaKind::Is, {std::move(t)}, f}); }

Formula Formula::not_is(SymbolId f, OpenTerm t) { return make(Node{FormulaKind::NotIs, {std::move(t)}, f}); }

Formula Formula::negation(Formula f) {
  if (f.is_true()) return truth(false);
  if (f.is_false()) return truth(true);
  return make(Node{FormulaKind::Not, {}, -1, {std::move(f)}});
}

namespace {

Formula junction(FormulaKind kind, std::vector<Formula> parts, Formula unit, Formula zero,
                 Formula (*build)(FormulaKind, std::vector<Formula>)) {
  std::vector<Formula> flat;
  for (Formula& p : parts) {
    if (p == zero) return zero;
    if (p == unit) continue;
    if (p.kind() == kind) {
      for (const Formula& q : p.parts()) {
        if (std::find(flat.begin(), flat.end(), q) == flat.end()) flat.push_back(q);
      }
    } else if (std::find(flat.begin(), flat.end(), p) == flat.end()) {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return unit;
  if (flat.size() == 1) return flat[0];

  // Complementary literals, and a variable pinned to (∧) or kept from (∨)
  // two distinct B elements.
  FormulaKind pin = kind == FormulaKind::And ? FormulaKind::Eq : FormulaKind::Neq;
  std::unordered_map<std::string, ElementId> pinned;
  std::unordered_set<std::size_t> literal_hashes;
  for (const Formula& p : flat) {
    if (p.is_literal()) literal_hashes.insert(p.hash());
  }
  for (const Formula& p : flat) {
    if (!p.is_literal()) continue;
    Formula q = negate_literal(p);
    if (literal_hashes.contains(q.hash()) && std::find(flat.begin(), flat.end(), q) != flat.end()) return zero;
    if (p.kind() != pin) continue;
    const OpenTerm* v = p.lhs().is_var() ? &p.lhs() : p.rhs().is_var() ? &p.rhs() : nullptr;
    const OpenTerm* e = p.lhs().is_elem() ? &p.lhs() : p.rhs().is_elem() ? &p.rhs() : nullptr;
    if (!v || !e) continue;
    auto [it, fresh] = pinned.emplace(v->name(), e->element());
    if (!fresh && it->second != e->element()) return zero;
  }

  // Absorption: p ∨ (p ∧ q) = p and p ∧ (p ∨ q) = p.
  FormulaKind dual = kind == FormulaKind::And ? FormulaKind::Or : FormulaKind::And;
  auto members = [&](const Formula& p) {
    return p.kind() == dual ? std::vector<Formula>(p.parts().begin(), p.parts().end()) : std::vector<Formula>{p};
  };
  std::vector<std::vector<Formula>> sets;
  std::vector<std::unordered_set<std::size_t>> hashes;
  for (const Formula& p : flat) {
    sets.push_back(members(p));
    hashes.emplace_back();
    for (const Formula& q : sets.back()) hashes.back().insert(q.hash());
  }
  auto within = [&](std::size_t j, std::size_t i) {
    if (sets[j].size() > sets[i].size()) return false;
    for (const Formula& q : sets[j]) {
      if (!hashes[i].contains(q.hash())) return false;
      if (std::find(sets[i].begin(), sets[i].end(), q) == sets[i].end()) return false;
    }
    return true;
  };
  std::vector<bool> dropped(flat.size(), false);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    for (std::size_t j = 0; j < flat.size() && !dropped[i]; ++j) {
      if (j == i || dropped[j] || !within(j, i)) continue;
      // Equal member sets: keep the earlier one.
      if (sets[j].size() < sets[i].size() || j < i) dropped[i] = true;
    }
  }
  std::vector<Formula> kept;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (!dropped[i]) kept.push_back(std::move(flat[i]));
  }
  if (kept.size() == 1) return kept[0];
  return build(kind, std::move(kept));
}

}  // namespace

Formula Formula::conj(std::vector<Formula> parts) {
  return junction(FormulaKind::And, std::move(parts), truth(true), truth(false),
                  [](FormulaKind k, std::vector<Formula> ps) { return make(Node{k, {}, -1, std::move(ps)}); });
}

Formula Formula::disj(std::vector<Formula> parts) {
  return junction(FormulaKind::Or, std::move(parts), truth(false), truth(true),
                  [](FormulaKind k, std::vector<Formula> ps) { return make(Node{k, {}, -1, std::move(ps)}); });
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  if (vars.empty() || body.is_true() || body.is_false()) return body;
  return make(Node{FormulaKind::Exists, {}, -1, {std::move(body)}, std::move(vars)});
}

Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  if (vars.empty() || body.is_true() || body.is_false()) return body;
  return make(Node{FormulaKind::Forall, {}, -1, {std::move(body)}, std::move(vars)});
}

bool Formula::is_literal() const {
  switch (kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
    case FormulaKind::Neq:
    case FormulaKind::Is:
    case FormulaKind::NotIs: return true;
    default: return false;
  }
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.node_->symbol != b.node_->symbol) return false;
  return a.node_->terms == b.node_->terms && a.node_->parts == b.node_->parts && a.node_->bound == b.node_->bound;
}

Formula negate_literal(const Formula& lit) {
  switch (lit.kind()) {
    case FormulaKind::True: return Formula::truth(false);
    case FormulaKind::False: return Formula::truth(true);
    case FormulaKind::Eq: return Formula::neq(lit.lhs(), lit.rhs());
    case FormulaKind::Neq: return Formula::eq(lit.lhs(), lit.rhs());
    case FormulaKind::Is: return Formula::not_is(lit.tester(), lit.operand());
    case FormulaKind::NotIs: return Formula::is(lit.tester(), lit.operand());
    default: throw Error(ErrorKind::Syntax, "negate_literal applied to a compound formula");
  }
}

namespace {

void collect_vars(const Formula& f, std::set<std::string>& out) {
  if (f.is_literal() && !f.is_true() && !f.is_false()) {
    out.insert(f.lhs().vars().begin(), f.lhs().vars().end());
    if (f.kind() == FormulaKind::Eq || f.kind() == FormulaKind::Neq) out.insert(f.rhs().vars().begin(), f.rhs().vars().end());
    return;
  }
  out.insert(f.bound().begin(), f.bound().end());
  for (const Formula& p : f.parts()) collect_vars(p, out);
}

}  // namespace

std::set<std::string> all_vars(const Formula& f) {
  std::set<std::string> out;
  collect_vars(f, out);
  return out;
}

bool is_quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  for (const Formula& p : f.parts()) {
    if (!is_quantifier_free(p)) return false;
  }
  return true;
}

std::size_t formula_size(const Formula& f) {
  std::size_t n = 1;
  if (f.is_literal() && !f.is_true() && !f.is_false()) {
    n += f.lhs().size();
    if (f.kind() == FormulaKind::Eq || f.kind() == FormulaKind::Neq) n += f.rhs().size();
  }
  for (const Formula& p : f.parts()) n += formula_size(p);
  return n;
}

Formula substitute(const PartialAlgebra& b, const Formula& f, const std::string& v, const OpenTerm& by) {
  if (!std::binary_search(f.free().begin(), f.free().end(), v)) return f;
  switch (f.kind()) {
    case FormulaKind::Eq: return Formula::eq(substitute(b, f.lhs(), v, by), substitute(b, f.rhs(), v, by));
    case FormulaKind::Neq: return Formula::neq(substitute(b, f.lhs(), v, by), substitute(b, f.rhs(), v, by));
    case FormulaKind::Is: return Formula::is(f.tester(), substitute(b, f.operand(), v, by));
    case FormulaKind::NotIs: return Formula::not_is(f.tester(), substitute(b, f.operand(), v, by));
    case FormulaKind::Not: return Formula::negation(substitute(b, f.body(), v, by));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> parts;
      for (const Formula& p : f.parts()) parts.push_back(substitute(b, p, v, by));
      return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Exists: return Formula::exists(f.bound(), substitute(b, f.body(), v, by));
    case FormulaKind::Forall: return Formula::forall(f.bound(), substitute(b, f.body(), v, by));
    default: return f;
  }
}

// ------------------------------------------------------------------ Parser

namespace {

using detail::Tok;
using detail::TokenStream;

bool keyword(const std::string& s) {
  return s == "exists" || s == "forall" || s == "not" || s == "true" || s == "false";
}

OpenTerm from_fb(const PartialAlgebra& b, const FBTerm& x) {
  if (x.is_element()) return OpenTerm::elem(x.element());
  std::vector<OpenTerm> args;
  for (const FBTerm& c : x.children()) args.push_back(from_fb(b, c));
  return OpenTerm::raw_app(x.symbol(), std::move(args));
}

class FormulaParser {
 public:
  FormulaParser(TokenStream& in, const PartialAlgebra& b, ParseOptions opts) : in_(in), b_(b), opts_(opts) {}

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (in_.accept(Tok::Bar)) parts.push_back(conjunction());
    return parts.size() == 1 ? parts[0] : Formula::disj(std::move(parts));
  }

 private:
  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (in_.accept(Tok::Amp)) parts.push_back(unary());
    return parts.size() == 1 ? parts[0] : Formula::conj(std::move(parts));
  }

  Formula unary() {
    const detail::Token& tok = in_.peek();
    if (in_.accept(Tok::Bang)) return negate(unary());
    if (tok.kind == Tok::LParen) {
      in_.next();
      Formula f = disjunction();
      in_.expect(Tok::RParen, "')'");
      return f;
    }
    if (tok.kind == Tok::Ident) {
      if (tok.text == "not") {
        in_.next();
        return negate(unary());
      }
      if (tok.text == "true" || tok.text == "false") {
        bool v = tok.text == "true";
        in_.next();
        return Formula::truth(v);
      }
      if (tok.text == "exists" || tok.text == "forall") return quantifier();
      if (tok.text.starts_with("is_") && in_.peek(1).kind == Tok::LParen) {
        auto f = b_.signature().find(tok.text.substr(3));
        if (f && !b_.signature().is_constant(*f)) {
          in_.next();
          in_.next();
          OpenTerm t = term();
          in_.expect(Tok::RParen, "')'");
          return Formula::is(*f, std::move(t));
        }
      }
    }
    OpenTerm s = term();
    if (in_.accept(Tok::Eq)) return Formula::eq(std::move(s), term());
    if (in_.accept(Tok::Neq)) return Formula::neq(std::move(s), term());
    in_.fail(ErrorKind::Syntax, "expected '=' or '!='");
  }

  static Formula negate(Formula f) {
    if (f.is_literal()) return negate_literal(f);
    return Formula::negation(std::move(f));
  }

  Formula quantifier() {
    bool ex = in_.next().text == "exists";
    std::vector<std::string> vars;
    while (in_.at(Tok::Ident)) {
      const detail::Token& v = in_.next();
      if (keyword(v.text) || b_.signature().find(v.text)) {
        throw Error(ErrorKind::Syntax, "'" + v.text + "' cannot be a variable", v.line, v.column);
      }
      vars.push_back(v.text);
    }
    if (vars.empty()) in_.fail(ErrorKind::Syntax, "expected a variable");
    in_.expect(Tok::Dot, "'.'");
    std::size_t mark = scope_.size();
    scope_.insert(scope_.end(), vars.begin(), vars.end());
    Formula body = disjunction();
    scope_.resize(mark);
    return ex ? Formula::exists(std::move(vars), std::move(body)) : Formula::forall(std::move(vars), std::move(body));
  }

  OpenTerm term() {
    const detail::Token tok = in_.peek();
    const Signature& sig = b_.signature();
    if (in_.accept(Tok::LBracket)) {
      Term g = detail::parse_term_tokens(in_, sig);
      in_.expect(Tok::RBracket, "']'");
      if (auto e = b_.element_of(g)) return OpenTerm::elem(*e);
      return from_fb(b_, normalize(b_, g));
    }
    if (tok.kind != Tok::Ident) in_.fail(ErrorKind::Syntax, "expected a term");
    in_.next();
    if (auto f = sig.find(tok.text)) {
      if (sig.is_constant(*f)) return OpenTerm::elem(b_.constant(*f));
      in_.expect(Tok::LParen, "'('");
      std::vector<OpenTerm> args{term()};
      while (in_.accept(Tok::Comma)) args.push_back(term());
      in_.expect(Tok::RParen, "')'");
      if (static_cast<int>(args.size()) != sig.arity(*f)) {
        throw Error(ErrorKind::ArityMismatch,
                    "'" + tok.text + "' expects " + std::to_string(sig.arity(*f)) + " arguments", tok.line, tok.column);
      }
      return OpenTerm::app(b_, *f, std::move(args));
    }
    if (in_.at(Tok::LParen)) throw Error(ErrorKind::UnknownSymbol, "unknown function '" + tok.text + "'", tok.line, tok.column);
    if (keyword(tok.text)) throw Error(ErrorKind::Syntax, "'" + tok.text + "' cannot be a variable", tok.line, tok.column);
    if (!opts_.allow_free && std::find(scope_.begin(), scope_.end(), tok.text) == scope_.end()) {
      throw Error(ErrorKind::UnboundVariable, "variable '" + tok.text + "' is not bound", tok.line, tok.column);
    }
    return OpenTerm::var(tok.text);
  }

  TokenStream& in_;
  const PartialAlgebra& b_;
  ParseOptions opts_;
  std::vector<std::string> scope_;
};

}  // namespace

Formula parse_formula(std::string_view text, const PartialAlgebra& b, ParseOptions opts) {
  TokenStream in(detail::tokenize(text));
  Formula f = FormulaParser(in, b, opts).disjunction();
  if (!in.at(Tok::End)) in.fail(ErrorKind::TrailingInput, "trailing input '" + in.peek().text + "'");
  return f;
}

// ----------------------------------------------------------------- Printer

std::string to_string(const OpenTerm& t, const PartialAlgebra& b) {
  switch (t.kind()) {
    case OpenTerm::Kind::Var: return t.name();
    case OpenTerm::Kind::Elem: return "[" + to_string(b.name(t.element()), b.signature()) + "]";
    case OpenTerm::Kind::App: break;
  }
  std::string out = b.signature().name(t.symbol()) + "(";
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(t.args()[i], b);
  }
  return out + ")";
}

namespace {

int precedence(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    case FormulaKind::Exists:
    case FormulaKind::Forall: return 0;
    default: return 3;
  }
}

std::string print(const Formula& f, const PartialAlgebra& b);

std::string wrap(const Formula& f, const PartialAlgebra& b, int min) {
  std::string s = print(f, b);
  return precedence(f) < min ? "(" + s + ")" : s;
}

std::string join(const Formula& f, const PartialAlgebra& b, const char* sep, int min) {
  std::string out;
  for (std::size_t i = 0; i < f.parts().size(); ++i) {
    if (i > 0) out += sep;
    out += wrap(f.parts()[i], b, min);
  }
  return out;
}

std::string print(const Formula& f, const PartialAlgebra& b) {
  const Signature& sig = b.signature();
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Eq: return to_string(f.lhs(), b) + " = " + to_string(f.rhs(), b);
    case FormulaKind::Neq: return to_string(f.lhs(), b) + " != " + to_string(f.rhs(), b);
    case FormulaKind::Is: return "is_" + sig.name(f.tester()) + "(" + to_string(f.operand(), b) + ")";
    case FormulaKind::NotIs: return "!is_" + sig.name(f.tester()) + "(" + to_string(f.operand(), b) + ")";
    case FormulaKind::Not: return "!(" + print(f.body(), b) + ")";
    case FormulaKind::And: return join(f, b, " & ", 3);
    case FormulaKind::Or: return join(f, b, " | ", 2);
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::string out = f.kind() == FormulaKind::Exists ? "exists" : "forall";
      for (const std::string& v : f.bound()) out += " " + v;
      return out + ". " + print(f.body(), b);
    }
  }
  return {};
}

}  // namespace

std::string to_string(const Formula& f, const PartialAlgebra& b) { return print(f, b); }

// -------------------------------------------------------------- Evaluation

FBTerm evaluate(const PartialAlgebra& b, const OpenTerm& t, const Valuation& v) {
  switch (t.kind()) {
    case OpenTerm::Kind::Var: {
      auto it = v.find(t.name());
      if (it == v.end()) throw Error(ErrorKind::UnassignedVariable, "variable '" + t.name() + "' has no value");
      return it->second;
    }
    case OpenTerm::Kind::Elem: return FBTerm::element(t.element());
    case OpenTerm::Kind::App: break;
  }
  std::vector<FBTerm> args;
  for (const OpenTerm& a : t.args()) args.push_back(evaluate(b, a, v));
  return apply(b, t.symbol(), std::move(args));
}

bool evaluate_qf(const PartialAlgebra& b, const Formula& f, const Valuation& v) {
  switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Eq: return evaluate(b, f.lhs(), v) == evaluate(b, f.rhs(), v);
    case FormulaKind::Neq: return !(evaluate(b, f.lhs(), v) == evaluate(b, f.rhs(), v));
    case FormulaKind::Is: return is_f(b, evaluate(b, f.operand(), v), f.tester());
    case FormulaKind::NotIs: return !is_f(b, evaluate(b, f.operand(), v), f.tester());
    case FormulaKind::Not: return !evaluate_qf(b, f.body(), v);
    case FormulaKind::And:
      return std::all_of(f.parts().begin(), f.parts().end(), [&](const Formula& p) { return evaluate_qf(b, p, v); });
    case FormulaKind::Or:
      return std::any_of(f.parts().begin(), f.parts().end(), [&](const Formula& p) { return evaluate_qf(b, p, v); });
    default: throw Error(ErrorKind::Syntax, "evaluate_qf needs a quantifier-free formula");
  }
}

}  // namespace afa
