#pragma once

// The finite partial algebra B induced by Γ (classes of terms of height at
// most N) and its free extension F(B), whose elements are B-terms.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "afa/canonical.hpp"
#include "afa/term.hpp"

namespace afa {

using ElementId = int;

class PartialAlgebra {
 public:
  explicit PartialAlgebra(const Presentation& p);

  const Signature& signature() const { return sig_; }
  /// N: the greatest height of an equation side, 0 for Γ = ∅.
  int height_bound() const { return n_; }

  int size() const { return static_cast<int>(names_.size()); }
  /// Canonical representative naming an element.
  const Term& name(ElementId e) const { return names_[e]; }
  ElementId constant(SymbolId c) const { return constants_.at(c); }
  /// Element whose class contains `t`, if that class is in the carrier.
  std::optional<ElementId> element_of(const Term& t) const;

  std::optional<ElementId> op(SymbolId f, std::span<const ElementId> args) const;
  /// Every operation defined on every tuple; then F(B) = B.
  bool total() const { return total_; }

  /// All argument tuples of f whose value is defined, with that value.
  const std::vector<std::pair<std::vector<ElementId>, ElementId>>& defined(SymbolId f) const {
    return defined_.at(f);
  }

  std::string to_string() const;

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const;
  };

  Signature sig_;
  std::shared_ptr<const Presentation> pres_;
  int n_ = 0;
  std::vector<Term> names_;
  std::unordered_map<Term, ElementId> index_;
  std::unordered_map<SymbolId, ElementId> constants_;
  std::unordered_map<std::vector<int>, ElementId, VecHash> table_;  // (f, args...) -> value
  std::unordered_map<SymbolId, std::vector<std::pair<std::vector<ElementId>, ElementId>>> defined_;
  bool total_ = true;
};

inline PartialAlgebra build_partial_algebra(const Presentation& p) { return PartialAlgebra(p); }

/// An element of F(B): a B element, or an application whose value in B is
/// undefined. Structural equality; copies share storage.
class FBTerm {
 public:
  static FBTerm element(ElementId e);
  static FBTerm node(SymbolId f, std::vector<FBTerm> children);

  bool is_element() const { return node_->element >= 0; }
  ElementId element() const { return node_->element; }
  SymbolId symbol() const { return node_->symbol; }
  std::span<const FBTerm> children() const { return node_->children; }
  std::size_t hash() const { return node_->hash; }
  /// Height of the stuck spine; B elements count as height 0.
  int height() const { return node_->height; }

  friend bool operator==(const FBTerm& a, const FBTerm& b);

 private:
  struct Node {
    ElementId element;
    SymbolId symbol;
    std::vector<FBTerm> children;
    std::size_t hash;
    int height;
  };
  std::shared_ptr<const Node> node_;
};

struct FBTermHash {
  std::size_t operator()(const FBTerm& t) const { return t.hash(); }
};

FBTerm normalize(const PartialAlgebra& b, const Term& t);
/// Re-evaluates any application that has become defined.
FBTerm normalize(const PartialAlgebra& b, const FBTerm& t);
/// Throws ArityMismatch when the argument count is wrong.
FBTerm apply(const PartialAlgebra& b, SymbolId f, std::vector<FBTerm> args);
bool is_f(const PartialAlgebra& b, const FBTerm& x, SymbolId f);

/// A ground term denoting x: B elements replaced by their names.
Term to_ground(const PartialAlgebra& b, const FBTerm& x);
/// B elements print as "[rep]", stuck nodes in functional notation.
std::string to_string(const FBTerm& x, const PartialAlgebra& b);

/// All F(B)-terms whose stuck spine has height <= h, in increasing height.
std::vector<FBTerm> enumerate_fb_terms(const PartialAlgebra& b, int h, std::size_t limit);

}  // namespace afa
