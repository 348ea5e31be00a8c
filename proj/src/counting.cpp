#include "afa/counting.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "afa/error.hpp"

namespace afa {

namespace {

// Disjoint-set forest small enough to inline here.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

QuotientGraph quotient_from(const CongruenceGraph& g, Dsu& dsu) {
  QuotientGraph q;
  std::map<int, int> dense;
  q.class_of.resize(g.nodes.size());
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    auto [it, fresh] = dense.try_emplace(dsu.find(static_cast<int>(v)), static_cast<int>(dense.size()));
    q.class_of[v] = it->second;
  }
  q.successors.resize(dense.size());
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    for (int c : g.children[v]) q.successors[q.class_of[v]].insert(q.class_of[c]);
  }
  return q;
}

// Per class: can a directed cycle (self-loops included) be reached?
std::vector<bool> reaches_cycle(const QuotientGraph& q) {
  const int n = q.class_count();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  struct Frame {
    int v;
    std::set<int>::const_iterator next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, q.successors[root].begin()}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& fr = call.back();
      if (fr.next != q.successors[fr.v].end()) {
        int w = *fr.next++;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, q.successors[w].begin()});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      int v = fr.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> scc;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<int>(sccs.size());
          scc.push_back(w);
        } while (w != v);
        sccs.push_back(std::move(scc));
      }
    }
  }

  // Tarjan emits components sinks first, so successors are settled already.
  std::vector<bool> comp_reach(sccs.size(), false);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    const auto& scc = sccs[c];
    bool r = scc.size() > 1 || q.successors[scc[0]].contains(scc[0]);
    for (int v : scc) {
      for (int w : q.successors[v]) r = r || comp_reach[comp[w]];
    }
    comp_reach[c] = r;
  }
  std::vector<bool> out(n);
  for (int v = 0; v < n; ++v) out[v] = comp_reach[comp[v]];
  return out;
}

struct Analysis {
  CongruenceGraph graph;
  std::vector<int> types;
  QuotientGraph quotient;
  std::vector<bool> cyclic_class;
  std::vector<int> type_class;  // type-1 -> quotient class
};

Analysis analyse(const Presentation& p) {
  Analysis a;
  a.graph = build_r_gamma(p.equations());
  ClosureResult c = close(a.graph);
  const std::size_t n = a.graph.nodes.size();
  a.types.resize(n);
  for (std::size_t v = 0; v < n; ++v) a.types[v] = p.type_of(a.graph.subterm(static_cast<int>(v))).value_or(0);

  Dsu dsu(n);
  std::vector<int> first_of_class(static_cast<std::size_t>(c.class_count), -1);
  std::map<int, int> first_of_type;
  for (std::size_t v = 0; v < n; ++v) {
    int& f = first_of_class[c.class_of[v]];
    if (f < 0) f = static_cast<int>(v);
    dsu.unite(static_cast<int>(v), f);
    if (a.types[v] != 0) {
      auto [it, fresh] = first_of_type.try_emplace(a.types[v], static_cast<int>(v));
      dsu.unite(static_cast<int>(v), it->second);
    }
  }
  a.quotient = quotient_from(a.graph, dsu);
  a.cyclic_class = reaches_cycle(a.quotient);
  a.type_class.resize(static_cast<std::size_t>(p.types().count()));
  for (auto [type, v] : first_of_type) a.type_class[type - 1] = a.quotient.class_of[v];
  return a;
}

std::set<int> cyclic_from(const Analysis& a) {
  std::set<int> out;
  for (std::size_t i = 0; i < a.type_class.size(); ++i) {
    if (a.cyclic_class[a.type_class[i]]) out.insert(static_cast<int>(i) + 1);
  }
  return out;
}

}  // namespace

TypedMixedGraph typed_graph(const Presentation& p) {
  Analysis a = analyse(p);
  TypedMixedGraph out;
  ClosureResult c = close(a.graph);
  out.undirected = c.edges();
  const std::size_t n = a.graph.nodes.size();
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (a.types[u] != 0 && a.types[u] == a.types[v]) out.undirected.emplace(u, v);
    }
  }
  out.graph = std::move(a.graph);
  out.types = std::move(a.types);
  return out;
}

QuotientGraph quotient_graph(const TypedMixedGraph& g) {
  Dsu dsu(g.graph.nodes.size());
  for (auto [u, v] : g.undirected) dsu.unite(u, v);
  return quotient_from(g.graph, dsu);
}

std::set<int> cyclic_types(const Presentation& p) { return cyclic_from(analyse(p)); }

Cardinality class_size(const Presentation& p, const Term& t) {
  Analysis a = analyse(p);
  std::set<int> cyclic = cyclic_from(a);
  for (const Term& u : subterms(t)) {
    if (auto ty = p.type_of(u); ty && cyclic.contains(*ty)) return Cardinality::infinity();
  }

  std::map<int, Natural> memo;
  std::function<Natural(int)> count_type = [&](int type) -> Natural {
    if (auto it = memo.find(type); it != memo.end()) return it->second;
    int cls = a.type_class[type - 1];
    std::set<ReducedTree> seen;
    Natural total = 0;
    for (std::size_t v = 0; v < a.graph.nodes.size(); ++v) {
      if (a.quotient.class_of[v] != cls) continue;
      ReducedTree r = p.reduced_rep(a.graph.subterm(static_cast<int>(v)));
      if (!seen.insert(r).second) continue;
      Natural prod = 1;
      for (const auto& [pos, label] : r) {
        if (label.is_type) prod *= count_type(label.value);
      }
      total += prod;
    }
    memo.emplace(type, total);
    return total;
  };

  if (auto ty = p.type_of(t)) return {false, count_type(*ty)};
  Natural prod = 1;
  for (const auto& [pos, label] : p.reduced_rep(t)) {
    if (label.is_type) prod *= count_type(label.value);
  }
  return {false, prod};
}

bool intrinsic_infinite(const Presentation& p) {
  std::set<int> cyclic = cyclic_types(p);
  for (SymbolId c : p.signature().constants()) {
    auto ty = p.type_of(Term::constant(c));
    if (!ty || !cyclic.contains(*ty)) return false;
  }
  return true;
}

std::vector<Term> subterm_closure(const EquationSet& gamma, const Signature& sig) {
  std::unordered_set<Term> seen;
  std::vector<Term> out;
  for (const Term& side : gamma.sides()) {
    for (const Term& u : subterms(side)) {
      if (seen.insert(u).second) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end(), TermLess{&sig});
  return out;
}

namespace {

// Calls fn on every tuple of length k over [0, n).
template <class Fn>
bool for_each_tuple(int n, int k, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  if (n == 0 && k > 0) return true;
  while (true) {
    if (!fn(idx)) return false;
    int d = k - 1;
    while (d >= 0 && ++idx[d] == n) idx[d--] = 0;
    if (d < 0) return true;
  }
}

}  // namespace

bool is_finite(const Presentation& p) {
  const Signature& sig = p.signature();
  if (sig.functions().empty()) return true;
  const Congruence& cg = p.congruence();
  for (SymbolId c : sig.constants()) {
    if (!cg.find_class(Term::constant(c))) return false;
  }
  // Tuples over ST(Γ) taken one representative per class: f(t̄) depends on t̄
  // only through the classes of its arguments.
  for (SymbolId f : sig.functions()) {
    bool closed = for_each_tuple(cg.class_count(), sig.arity(f),
                                 [&](const std::vector<int>& tuple) { return cg.apply(f, tuple).has_value(); });
    if (!closed) return false;
  }
  return true;
}

int FiniteAlgebra::evaluate(const Term& t) const {
  if (t.is_constant()) return constants.at(t.symbol());
  std::vector<int> args;
  for (const Term& c : t.children()) args.push_back(evaluate(c));
  return table.at(t.symbol()).at(args);
}

FiniteAlgebra enumerate_if_finite(const Presentation& p) {
  if (!is_finite(p)) throw Error(ErrorKind::NotFinite, "the presented algebra is infinite");
  const Signature& sig = p.signature();
  std::vector<Term> reps;
  std::unordered_set<Term> have;
  auto add = [&](const Term& t) {
    Term r = p.canonical_rep(t);
    if (have.insert(r).second) reps.push_back(r);
  };
  for (SymbolId c : sig.constants()) add(Term::constant(c));
  std::size_t before = 0;
  while (before != reps.size()) {
    before = reps.size();
    std::vector<Term> snapshot = reps;
    for (SymbolId f : sig.functions()) {
      for_each_tuple(static_cast<int>(snapshot.size()), sig.arity(f), [&](const std::vector<int>& tuple) {
        std::vector<Term> kids;
        for (int i : tuple) kids.push_back(snapshot[i]);
        add(Term(f, std::move(kids)));
        return true;
      });
    }
  }

  FiniteAlgebra alg;
  std::sort(reps.begin(), reps.end(), TermLess{&sig});
  alg.elements = reps;
  std::unordered_map<Term, int> index;
  for (std::size_t i = 0; i < reps.size(); ++i) index.emplace(reps[i], static_cast<int>(i));
  for (SymbolId c : sig.constants()) alg.constants[c] = index.at(p.canonical_rep(Term::constant(c)));
  for (SymbolId f : sig.functions()) {
    auto& tab = alg.table[f];
    for_each_tuple(static_cast<int>(reps.size()), sig.arity(f), [&](const std::vector<int>& tuple) {
      std::vector<Term> kids;
      for (int i : tuple) kids.push_back(reps[i]);
      tab[tuple] = index.at(p.canonical_rep(Term(f, std::move(kids))));
      return true;
    });
  }
  return alg;
}

bool are_isomorphic(const Problem& p1, const Problem& p2) {
  if (!(p1.signature == p2.signature)) {
    throw Error(ErrorKind::SignatureMismatch, "presentations are over different signatures");
  }
  const Signature& sig = p1.signature;
  EquationSet both;
  for (const Equation& e : p1.equations) both.add(e.lhs, e.rhs);
  for (const Equation& e : p2.equations) both.add(e.lhs, e.rhs);
  std::vector<Term> b = subterm_closure(both, sig);
  std::unordered_set<Term> in_b(b.begin(), b.end());
  for (SymbolId c : sig.constants()) {
    Term t = Term::constant(c);
    if (in_b.insert(t).second) b.push_back(t);
  }

  Presentation g1(p1), g2(p2);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      if (g1.equal(b[i], b[j]) != g2.equal(b[i], b[j])) return false;
    }
  }
  return true;
}

}  // namespace afa
