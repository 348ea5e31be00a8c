#pragma once

// Signatures, ground terms and their positional tree representations.

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace afa {

using SymbolId = int;

struct Symbol {
  std::string name;
  int arity = 0;
};

/// A finite functional signature: function symbols of arity >= 1 plus
/// constants. Symbol ids are dense and assigned in declaration order.
class Signature {
 public:
  SymbolId add_function(std::string name, int arity);
  SymbolId add_constant(std::string name);

  std::optional<SymbolId> find(std::string_view name) const;
  const Symbol& symbol(SymbolId id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  const std::string& name(SymbolId id) const { return symbol(id).name; }
  int arity(SymbolId id) const { return symbol(id).arity; }
  bool is_constant(SymbolId id) const { return arity(id) == 0; }

  std::size_t symbol_count() const { return symbols_.size(); }
  std::span<const SymbolId> functions() const { return functions_; }
  std::span<const SymbolId> constants() const { return constants_; }
  int max_arity() const;

  /// True when every symbol name is a single character, which makes the
  /// parenthesis-free Polish notation unambiguous.
  bool polish_friendly() const;

  /// Declaration text accepted by parse_signature.
  std::string to_string() const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  SymbolId add(std::string name, int arity);

  std::vector<Symbol> symbols_;
  std::vector<SymbolId> functions_;
  std::vector<SymbolId> constants_;
  std::unordered_map<std::string, SymbolId> by_name_;
};

/// Immutable ground term with structural equality. Copies share storage.
class Term {
 public:
  Term(SymbolId symbol, std::vector<Term> children);
  static Term constant(SymbolId symbol) { return Term(symbol, {}); }

  SymbolId symbol() const { return node_->symbol; }
  std::span<const Term> children() const { return node_->children; }
  const Term& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }
  bool is_constant() const { return node_->children.empty(); }

  std::size_t hash() const { return node_->hash; }
  int height() const { return node_->height; }
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node {
    SymbolId symbol;
    std::vector<Term> children;
    std::size_t hash;
    int height;
    std::size_t size;
  };
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// Sequence of child indices from the root; empty is the root itself.
using Position = std::vector<int>;

/// Digit string when every arity is <= 10, otherwise dash-separated
/// integers. The root prints as "e".
std::string format_position(const Position& pos, int max_arity);
Position parse_position(std::string_view text, int max_arity);

/// Positional labelled tree: position -> symbol.
using TreeRepresentation = std::map<Position, SymbolId>;

Signature parse_signature(std::string_view text);
Term parse_term(std::string_view text, const Signature& sig);

/// Throws ArityMismatch / UnknownSymbol when `t` is not a term over `sig`.
void check_well_formed(const Term& t, const Signature& sig);

TreeRepresentation tree_of(const Term& t);
Term term_of_tree(const TreeRepresentation& tree, const Signature& sig);
Term subterm_at(const Term& t, const Position& pos);
std::vector<Position> positions(const Term& t);

inline int height(const Term& t) { return t.height(); }
inline std::size_t size(const Term& t) { return t.size(); }

/// Functional notation, e.g. "f(b,f(a,b))".
std::string to_string(const Term& t, const Signature& sig);
/// Parenthesis-free notation, e.g. "fbfab"; only meaningful for
/// single-character signatures.
std::string to_polish(const Term& t, const Signature& sig);

/// Fixed total order: height, then size, then functional-notation string.
std::strong_ordering compare_terms(const Term& a, const Term& b, const Signature& sig);

struct TermLess {
  const Signature* sig;
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b, *sig) < 0; }
};

/// All distinct subterms of `t`, including `t`.
std::vector<Term> subterms(const Term& t);

/// Every ground term of height <= `max_height`, grouped by increasing height.
/// Intended for small signatures in tests and tools.
std::vector<Term> enumerate_terms(const Signature& sig, int max_height, std::size_t limit);

}  // namespace afa

template <>
struct std::hash<afa::Term> {
  std::size_t operator()(const afa::Term& t) const { return t.hash(); }
};
