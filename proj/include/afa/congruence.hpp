#pragma once

// Congruence closure for ground equations: the tree graph R_Γ with its
// edge closure, and a hash-consed e-graph for repeated queries.

#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "afa/problem.hpp"
#include "afa/term.hpp"

namespace afa {

struct GraphNode {
  int origin;  // index into CongruenceGraph::origins
  SymbolId symbol;
  Position position;
};

/// Disjoint union of the trees of the origin terms. Nodes are numbered by
/// origin, then position in lexicographic order (preorder).
struct CongruenceGraph {
  std::vector<Term> origins;
  std::vector<GraphNode> nodes;
  std::vector<std::vector<int>> children;
  std::vector<int> roots;
  /// Equations of Γ as pairs of origin indices.
  std::vector<std::pair<int, int>> equations;

  int add_origin(const Term& t);
  Term subterm(int node) const { return subterm_at(origins[nodes[node].origin], nodes[node].position); }
};

using EdgeSet = std::set<std::pair<int, int>>;

struct ClosureResult {
  CongruenceGraph graph;
  /// Class id per node; ids are dense and numbered by first node.
  std::vector<int> class_of;
  int class_count = 0;

  bool connected(int u, int v) const { return class_of[u] == class_of[v]; }
  /// Undirected edges {u,v}, u < v, of the closed graph.
  EdgeSet edges() const;
};

CongruenceGraph build_r_gamma(const EquationSet& gamma);
CongruenceGraph extend_with_terms(CongruenceGraph r, const Term& s, const Term& t);
ClosureResult close(const CongruenceGraph& r);

/// Throws SignatureMismatch unless both terms are well formed over the
/// problem's signature.
bool decide_equal(const Problem& p, const Term& s, const Term& t);

namespace detail {

/// Union-find congruence closure over nodes (symbol, child nodes) seeded
/// with the given pairs. Returns dense class ids numbered by first node.
std::vector<int> close_nodes(std::span<const SymbolId> symbols, const std::vector<std::vector<int>>& children,
                             const std::vector<std::pair<int, int>>& seeds, int* class_count);

}  // namespace detail

/// Hash-consed e-graph of ST(Γ), closed once. A term outside every e-class
/// lies in a class disjoint from ST(Γ); such classes are never merged.
class Congruence {
 public:
  explicit Congruence(Problem p);

  const Problem& problem() const { return problem_; }
  const Signature& signature() const { return problem_.signature; }
  const EquationSet& equations() const { return problem_.equations; }

  int class_count() const { return class_count_; }

  /// E-nodes are the distinct subterms of Γ, children first.
  std::size_t enode_count() const { return enode_terms_.size(); }
  const Term& enode_term(int n) const { return enode_terms_[n]; }
  int enode_class(int n) const { return enode_class_[n]; }
  /// E-nodes of a class, in e-node order.
  const std::vector<int>& class_enodes(int c) const { return class_enodes_[c]; }

  /// Class of `t` if it is congruent to some subterm of Γ.
  std::optional<int> find_class(const Term& t) const;
  /// Class of f applied to the given classes, if that lies in ST(Γ)'s classes.
  std::optional<int> apply(SymbolId f, const std::vector<int>& child_classes) const;

  bool equal(const Term& s, const Term& t) const;

 private:
  struct SigHash {
    std::size_t operator()(const std::vector<int>& v) const;
  };

  Problem problem_;
  std::vector<Term> enode_terms_;
  std::vector<int> enode_class_;
  std::vector<std::vector<int>> class_enodes_;
  int class_count_ = 0;
  /// (symbol, child classes...) -> class.
  std::unordered_map<std::vector<int>, int, SigHash> table_;
};

}  // namespace afa
