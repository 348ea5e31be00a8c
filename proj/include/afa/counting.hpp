#pragma once

// Class cardinality, intrinsic infinity, finiteness and isomorphism of
// presentations.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "afa/canonical.hpp"
#include "afa/congruence.hpp"
#include "afa/problem.hpp"

namespace afa {

using Natural = boost::multiprecision::cpp_int;

/// Exact class size or infinity.
struct Cardinality {
  bool infinite = false;
  Natural value = 1;

  static Cardinality infinity() { return {true, 0}; }
  std::string to_string() const { return infinite ? "inf" : value.str(); }
  friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

/// R_Γ with a type per node (0 = untyped) and the undirected edges of the
/// closure plus edges between distinct nodes of equal type.
struct TypedMixedGraph {
  CongruenceGraph graph;
  std::vector<int> types;
  EdgeSet undirected;
};

/// Components of the undirected edges; an edge [v] -> [w] for every tree edge.
struct QuotientGraph {
  std::vector<int> class_of;  // per R_Γ node
  std::vector<std::set<int>> successors;

  int class_count() const { return static_cast<int>(successors.size()); }
};

TypedMixedGraph typed_graph(const Presentation& p);
QuotientGraph quotient_graph(const TypedMixedGraph& g);

std::set<int> cyclic_types(const Presentation& p);
Cardinality class_size(const Presentation& p, const Term& t);
bool intrinsic_infinite(const Presentation& p);

/// ST(Γ): every subterm of every equation side, in term order.
std::vector<Term> subterm_closure(const EquationSet& gamma, const Signature& sig);

bool is_finite(const Presentation& p);

/// F_Γ as a total algebra. Elements are canonical representatives in term
/// order; table[f] maps argument index tuples to an element index.
struct FiniteAlgebra {
  std::vector<Term> elements;
  std::map<SymbolId, int> constants;
  std::map<SymbolId, std::map<std::vector<int>, int>> table;

  int evaluate(const Term& t) const;
};

/// Throws NotFinite when is_finite(p) is false.
FiniteAlgebra enumerate_if_finite(const Presentation& p);

/// Throws SignatureMismatch when the two signatures differ.
bool are_isomorphic(const Problem& p1, const Problem& p2);

}  // namespace afa
