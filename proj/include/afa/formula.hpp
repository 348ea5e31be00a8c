#pragma once

// First-order formulas over F(B) with tester predicates: terms with
// variables and B elements, atoms, connectives and quantifiers.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afa/free_extension.hpp"

namespace afa {

/// A term over Σ, B elements and variables. Applications whose arguments
/// are all B elements with a defined value are folded into that element by
/// the builders below.
class OpenTerm {
 public:
  enum class Kind { Var, Elem, App };

  static OpenTerm var(std::string name);
  static OpenTerm elem(ElementId e);
  /// Folds defined applications of B.
  static OpenTerm app(const PartialAlgebra& b, SymbolId f, std::vector<OpenTerm> args);
  /// No folding; for input that has not met a B yet.
  static OpenTerm raw_app(SymbolId f, std::vector<OpenTerm> args);

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_elem() const { return kind() == Kind::Elem; }
  bool is_app() const { return kind() == Kind::App; }
  const std::string& name() const { return node_->name; }
  ElementId element() const { return node_->element; }
  SymbolId symbol() const { return node_->symbol; }
  std::span<const OpenTerm> args() const { return node_->args; }
  std::size_t size() const { return node_->size; }
  std::size_t hash() const { return node_->hash; }

  /// Variables in order of first occurrence.
  bool ground() const { return node_->vars.empty(); }
  const std::vector<std::string>& vars() const { return node_->vars; }
  bool contains(const std::string& v) const;

  friend bool operator==(const OpenTerm& a, const OpenTerm& b);

 private:
  struct Node {
    Kind kind;
    std::string name{};
    ElementId element = -1;
    SymbolId symbol = -1;
    std::vector<OpenTerm> args{};
    std::vector<std::string> vars{};
    std::size_t size = 1;
    std::size_t hash = 0;
  };
  std::shared_ptr<const Node> node_;
};

OpenTerm substitute(const PartialAlgebra& b, const OpenTerm& t, const std::string& v, const OpenTerm& by);

enum class FormulaKind { True, False, Eq, Neq, Is, NotIs, Not, And, Or, Exists, Forall };

/// Immutable formula tree. The builders flatten nested ∧/∨, absorb ⊤/⊥,
/// drop subsumed parts and detect complementary literals, but otherwise
/// keep the shape they are given.
class Formula {
 public:
  static Formula truth(bool value);
  static Formula eq(OpenTerm s, OpenTerm t);
  static Formula neq(OpenTerm s, OpenTerm t);
  static Formula is(SymbolId f, OpenTerm t);
  static Formula not_is(SymbolId f, OpenTerm t);
  static Formula negation(Formula f);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula forall(std::vector<std::string> vars, Formula body);

  FormulaKind kind() const { return node_->kind; }
  bool is_literal() const;
  bool is_true() const { return kind() == FormulaKind::True; }
  bool is_false() const { return kind() == FormulaKind::False; }
  bool is_quantifier() const { return kind() == FormulaKind::Exists || kind() == FormulaKind::Forall; }

  const OpenTerm& lhs() const { return node_->terms[0]; }
  const OpenTerm& rhs() const { return node_->terms[1]; }
  /// Operand of a tester atom.
  const OpenTerm& operand() const { return node_->terms[0]; }
  SymbolId tester() const { return node_->symbol; }
  std::span<const Formula> parts() const { return node_->parts; }
  const Formula& body() const { return node_->parts[0]; }
  const std::vector<std::string>& bound() const { return node_->bound; }
  /// Free variables, sorted.
  const std::vector<std::string>& free() const { return node_->free; }
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    FormulaKind kind;
    std::vector<OpenTerm> terms{};
    SymbolId symbol = -1;
    std::vector<Formula> parts{};
    std::vector<std::string> bound{};
    std::vector<std::string> free{};
    std::size_t hash = 0;
  };
  static Formula make(Node n);
  std::shared_ptr<const Node> node_;
};

/// Literal negation: = ↔ ≠, Is ↔ ¬Is, ⊤ ↔ ⊥.
Formula negate_literal(const Formula& lit);

std::set<std::string> all_vars(const Formula& f);
bool is_quantifier_free(const Formula& f);
std::size_t formula_size(const Formula& f);

/// Capture-free for the formulas built here, whose bound names are unique.
Formula substitute(const PartialAlgebra& b, const Formula& f, const std::string& v, const OpenTerm& by);

struct ParseOptions {
  bool allow_free = true;
};

/// Grammar: `exists v w.` / `forall v.` (scope extends to the right), `|`,
/// `&`, `!` or `not`, `=`, `!=`, `is_<f>(t)`, `true`, `false`, parentheses,
/// and `[t]` for the B element whose class contains the ground term t.
/// Σ constants denote their B elements.
Formula parse_formula(std::string_view text, const PartialAlgebra& b, ParseOptions opts = {});

std::string to_string(const OpenTerm& t, const PartialAlgebra& b);
std::string to_string(const Formula& f, const PartialAlgebra& b);

using Valuation = std::map<std::string, FBTerm>;

FBTerm evaluate(const PartialAlgebra& b, const OpenTerm& t, const Valuation& v);
/// Throws UnassignedVariable for a free variable missing from `v`.
bool evaluate_qf(const PartialAlgebra& b, const Formula& f, const Valuation& v);

}  // namespace afa
