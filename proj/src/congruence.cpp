#include "afa/congruence.hpp"

#include <deque>
#include <numeric>
#include <unordered_map>

#include "afa/error.hpp"

namespace afa {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = v.size();
    for (int x : v) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  /// Returns (kept root, absorbed root).
  std::pair<int, int> unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return {a, b};
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace

namespace detail {

std::vector<int> close_nodes(std::span<const SymbolId> symbols, const std::vector<std::vector<int>>& children,
                             const std::vector<std::pair<int, int>>& seeds, int* class_count) {
  const std::size_t n = symbols.size();
  UnionFind uf(n);
  std::vector<std::vector<int>> uses(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (int c : children[v]) uses[c].push_back(static_cast<int>(v));
  }

  auto signature = [&](int v) {
    std::vector<int> sig{symbols[v]};
    for (int c : children[v]) sig.push_back(uf.find(c));
    return sig;
  };

  std::unordered_map<std::vector<int>, int, VecHash> table;
  std::deque<std::pair<int, int>> pending(seeds.begin(), seeds.end());
  for (std::size_t v = 0; v < n; ++v) {
    auto [it, fresh] = table.try_emplace(signature(static_cast<int>(v)), static_cast<int>(v));
    if (!fresh) pending.emplace_back(static_cast<int>(v), it->second);
  }

  while (!pending.empty()) {
    auto [a, b] = pending.front();
    pending.pop_front();
    if (uf.find(a) == uf.find(b)) continue;
    auto [kept, absorbed] = uf.unite(a, b);
    for (int p : uses[absorbed]) {
      std::vector<int> sig = signature(p);
      auto it = table.find(sig);
      if (it == table.end()) {
        table.emplace(std::move(sig), p);
      } else if (signature(it->second) != sig) {
        it->second = p;
      } else if (uf.find(it->second) != uf.find(p)) {
        pending.emplace_back(p, it->second);
      }
    }
    auto& dst = uses[kept];
    dst.insert(dst.end(), uses[absorbed].begin(), uses[absorbed].end());
    uses[absorbed].clear();
  }

  std::vector<int> class_of(n);
  std::unordered_map<int, int> dense;
  for (std::size_t v = 0; v < n; ++v) {
    auto [it, fresh] = dense.try_emplace(uf.find(static_cast<int>(v)), static_cast<int>(dense.size()));
    class_of[v] = it->second;
  }
  if (class_count) *class_count = static_cast<int>(dense.size());
  return class_of;
}

}  // namespace detail

// --------------------------------------------------------------- R_Γ graph

int CongruenceGraph::add_origin(const Term& t) {
  int origin = static_cast<int>(origins.size());
  origins.push_back(t);
  Position at;
  // Preorder walk; returns the node id of the subtree root.
  auto walk = [&](auto&& self, const Term& u) -> int {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({origin, u.symbol(), at});
    children.emplace_back();
    for (std::size_t i = 0; i < u.arity(); ++i) {
      at.push_back(static_cast<int>(i));
      int c = self(self, u.child(i));
      at.pop_back();
      children[id].push_back(c);
    }
    return id;
  };
  roots.push_back(walk(walk, t));
  return origin;
}

CongruenceGraph build_r_gamma(const EquationSet& gamma) {
  CongruenceGraph g;
  std::unordered_map<Term, int> origin_of;
  for (const Term& side : gamma.sides()) origin_of.emplace(side, g.add_origin(side));
  for (const Equation& e : gamma) g.equations.emplace_back(origin_of.at(e.lhs), origin_of.at(e.rhs));
  return g;
}

CongruenceGraph extend_with_terms(CongruenceGraph r, const Term& s, const Term& t) {
  r.add_origin(s);
  r.add_origin(t);
  return r;
}

ClosureResult close(const CongruenceGraph& r) {
  std::vector<SymbolId> symbols;
  symbols.reserve(r.nodes.size());
  for (const GraphNode& n : r.nodes) symbols.push_back(n.symbol);

  // Step 0: syntactically equal rooted subterms, found by hashing, plus Γ.
  std::vector<std::pair<int, int>> seeds;
  std::unordered_map<Term, int> first;
  for (std::size_t v = 0; v < r.nodes.size(); ++v) {
    auto [it, fresh] = first.try_emplace(r.subterm(static_cast<int>(v)), static_cast<int>(v));
    if (!fresh) seeds.emplace_back(it->second, static_cast<int>(v));
  }
  for (auto [a, b] : r.equations) seeds.emplace_back(r.roots[a], r.roots[b]);

  ClosureResult out;
  out.graph = r;
  out.class_of = detail::close_nodes(symbols, r.children, seeds, &out.class_count);
  return out;
}

EdgeSet ClosureResult::edges() const {
  EdgeSet out;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(class_count));
  for (std::size_t v = 0; v < class_of.size(); ++v) members[class_of[v]].push_back(static_cast<int>(v));
  for (const auto& m : members) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i + 1; j < m.size(); ++j) out.emplace(m[i], m[j]);
    }
  }
  return out;
}

namespace {

void require_over(const Term& t, const Signature& sig) {
  try {
    check_well_formed(t, sig);
  } catch (const Error& e) {
    throw Error(ErrorKind::SignatureMismatch, std::string("term is not over the problem signature: ") + e.what());
  }
}

}  // namespace

bool decide_equal(const Problem& p, const Term& s, const Term& t) {
  require_over(s, p.signature);
  require_over(t, p.signature);
  if (s == t) return true;
  CongruenceGraph g = extend_with_terms(build_r_gamma(p.equations), s, t);
  ClosureResult c = close(g);
  auto n = g.roots.size();
  return c.connected(g.roots[n - 2], g.roots[n - 1]);
}

// ---------------------------------------------------------------- e-graph

std::size_t Congruence::SigHash::operator()(const std::vector<int>& v) const { return VecHash{}(v); }

Congruence::Congruence(Problem p) : problem_(std::move(p)) {
  for (const Equation& e : problem_.equations) {
    require_over(e.lhs, problem_.signature);
    require_over(e.rhs, problem_.signature);
  }
  std::unordered_map<Term, int> id_of;
  std::vector<SymbolId> symbols;
  std::vector<std::vector<int>> children;
  auto intern = [&](auto&& self, const Term& t) -> int {
    if (auto it = id_of.find(t); it != id_of.end()) return it->second;
    std::vector<int> kids;
    for (const Term& c : t.children()) kids.push_back(self(self, c));
    int id = static_cast<int>(enode_terms_.size());
    enode_terms_.push_back(t);
    symbols.push_back(t.symbol());
    children.push_back(std::move(kids));
    id_of.emplace(t, id);
    return id;
  };
  std::vector<std::pair<int, int>> seeds;
  for (const Equation& e : problem_.equations) {
    int a = intern(intern, e.lhs);
    int b = intern(intern, e.rhs);
    seeds.emplace_back(a, b);
  }
  enode_class_ = detail::close_nodes(symbols, children, seeds, &class_count_);
  class_enodes_.resize(static_cast<std::size_t>(class_count_));
  for (std::size_t n = 0; n < enode_terms_.size(); ++n) {
    class_enodes_[enode_class_[n]].push_back(static_cast<int>(n));
    std::vector<int> sig{symbols[n]};
    for (int c : children[n]) sig.push_back(enode_class_[c]);
    table_.emplace(std::move(sig), enode_class_[n]);
  }
}

std::optional<int> Congruence::apply(SymbolId f, const std::vector<int>& child_classes) const {
  std::vector<int> sig{f};
  sig.insert(sig.end(), child_classes.begin(), child_classes.end());
  auto it = table_.find(sig);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Congruence::find_class(const Term& t) const {
  std::vector<int> kids;
  kids.reserve(t.arity());
  for (const Term& c : t.children()) {
    auto k = find_class(c);
    if (!k) return std::nullopt;
    kids.push_back(*k);
  }
  return apply(t.symbol(), kids);
}

bool Congruence::equal(const Term& s, const Term& t) const {
  std::unordered_map<Term, std::optional<int>> memo;
  auto cls = [&](auto&& self, const Term& u) -> std::optional<int> {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    std::optional<int> out;
    std::vector<int> kids;
    bool ok = true;
    for (const Term& c : u.children()) {
      auto k = self(self, c);
      if (!k) {
        ok = false;
        break;
      }
      kids.push_back(*k);
    }
    if (ok) out = apply(u.symbol(), kids);
    memo.emplace(u, out);
    return out;
  };
  auto eq = [&](auto&& self, const Term& a, const Term& b) -> bool {
    if (a == b) return true;
    auto ca = cls(cls, a);
    auto cb = cls(cls, b);
    if (ca || cb) return ca == cb;
    if (a.symbol() != b.symbol()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!self(self, a.child(i), b.child(i))) return false;
    }
    return true;
  };
  return eq(eq, s, t);
}

}  // namespace afa
