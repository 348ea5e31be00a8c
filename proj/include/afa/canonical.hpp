#pragma once

// Types of terms, reduced typed representations r(t) and canonical
// representatives.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afa/congruence.hpp"
#include "afa/problem.hpp"
#include "afa/term.hpp"

namespace afa {

/// Types are numbered 1..count() in increasing order of representative.
struct TypeAssignment {
  /// components[i-1]: the equation sides of type i, in term order.
  std::vector<std::vector<Term>> components;
  /// representatives[i-1]: least member of components[i-1].
  std::vector<Term> representatives;

  int count() const { return static_cast<int>(representatives.size()); }
};

struct ReducedLabel {
  bool is_type = false;
  int value = 0;  // SymbolId, or type index when is_type

  friend auto operator<=>(const ReducedLabel&, const ReducedLabel&) = default;
};

using ReducedTree = std::map<Position, ReducedLabel>;

std::string to_string(const ReducedTree& r, const Signature& sig);

/// A presentation with its closed e-graph and types, built once and then
/// queried; immutable after construction.
class Presentation {
 public:
  explicit Presentation(Problem p);

  const Problem& problem() const { return cong_.problem(); }
  const Signature& signature() const { return cong_.signature(); }
  const EquationSet& equations() const { return cong_.equations(); }
  const Congruence& congruence() const { return cong_; }
  const TypeAssignment& types() const { return types_; }

  bool equal(const Term& s, const Term& t) const { return cong_.equal(s, t); }

  std::optional<int> type_of(const Term& t) const;
  /// Type of an e-class, if it contains an equation side.
  std::optional<int> type_of_class(int eclass) const;
  int class_of_type(int type) const { return type_class_[type - 1]; }

  ReducedTree reduced_rep(const Term& t) const;
  Term canonical_rep(const Term& t) const;

 private:
  Congruence cong_;
  TypeAssignment types_;
  std::vector<int> class_type_;  // e-class -> type, 0 when untyped
  std::vector<int> type_class_;
};

TypeAssignment compute_types(const Problem& p);
std::optional<int> type_of(const Problem& p, const Term& t);
ReducedTree reduced_rep(const Problem& p, const Term& t);
Term canonical_rep(const Problem& p, const Term& t);

}  // namespace afa
