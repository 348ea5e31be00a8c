#include "afa/free_extension.hpp"

#include <algorithm>

#include "afa/error.hpp"

namespace afa {

namespace {

template <class Fn>
void for_each_tuple(int n, int k, Fn&& fn) {
  if (n == 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    fn(idx);
    int d = k - 1;
    while (d >= 0 && ++idx[d] == n) idx[d--] = 0;
    if (d < 0) return;
  }
}

std::size_t mix(std::size_t h, std::size_t x) { return h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

}  // namespace

std::size_t PartialAlgebra::VecHash::operator()(const std::vector<int>& v) const {
  std::size_t h = v.size();
  for (int x : v) h = mix(h, static_cast<std::size_t>(x));
  return h;
}

PartialAlgebra::PartialAlgebra(const Presentation& p)
    : sig_(p.signature()), pres_(std::make_shared<const Presentation>(p)), n_(p.equations().max_height()) {
  // A class is keyed by its e-class when it meets ST(Γ), and otherwise by
  // its root symbol and child classes, since such classes are never merged.
  const Congruence& cong = pres_->congruence();
  std::unordered_map<std::vector<int>, int, VecHash> by_key;
  std::vector<Term> terms;
  std::vector<std::optional<int>> eclass;
  auto key_of = [&](SymbolId f, const std::vector<int>& tuple, std::optional<int>* ec) {
    std::vector<int> cls;
    for (int i : tuple) {
      if (!eclass[i]) break;
      cls.push_back(*eclass[i]);
    }
    *ec = cls.size() == tuple.size() ? cong.apply(f, cls) : std::nullopt;
    if (*ec) return std::vector<int>{-1, **ec};
    std::vector<int> key{f};
    key.insert(key.end(), tuple.begin(), tuple.end());
    return key;
  };
  auto add = [&](SymbolId f, const std::vector<int>& tuple) {
    std::optional<int> ec;
    std::vector<int> key = key_of(f, tuple, &ec);
    if (!by_key.emplace(std::move(key), static_cast<int>(terms.size())).second) return;
    std::vector<Term> kids;
    for (int i : tuple) kids.push_back(terms[i]);
    terms.push_back(kids.empty() ? Term::constant(f) : Term(f, std::move(kids)));
    eclass.push_back(ec);
  };
  for (SymbolId c : sig_.constants()) add(c, {});
  for (int h = 1; h <= n_; ++h) {
    int prev = static_cast<int>(terms.size());
    for (SymbolId f : sig_.functions()) {
      for_each_tuple(prev, sig_.arity(f), [&](const std::vector<int>& tuple) { add(f, tuple); });
    }
  }

  std::vector<Term> reps;
  for (const Term& t : terms) reps.push_back(pres_->canonical_rep(t));
  std::vector<int> order(terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  TermLess less{&sig_};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return less(reps[x], reps[y]); });
  std::vector<ElementId> id_of(terms.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    id_of[order[i]] = static_cast<ElementId>(i);
    names_.push_back(reps[order[i]]);
    index_.emplace(reps[order[i]], static_cast<ElementId>(i));
  }
  for (SymbolId c : sig_.constants()) constants_[c] = index_.at(pres_->canonical_rep(Term::constant(c)));

  // Tables are indexed by building order and translated to element ids.
  for (SymbolId f : sig_.functions()) {
    auto& defs = defined_[f];
    for_each_tuple(size(), sig_.arity(f), [&](const std::vector<int>& tuple) {
      std::vector<int> building;
      for (int e : tuple) building.push_back(order[e]);
      std::optional<int> ec;
      auto it = by_key.find(key_of(f, building, &ec));
      if (it == by_key.end()) {
        total_ = false;
        return;
      }
      std::vector<int> key{f};
      key.insert(key.end(), tuple.begin(), tuple.end());
      table_.emplace(std::move(key), id_of[it->second]);
      defs.emplace_back(tuple, id_of[it->second]);
    });
  }
}

std::optional<ElementId> PartialAlgebra::element_of(const Term& t) const {
  auto it = index_.find(pres_->canonical_rep(t));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ElementId> PartialAlgebra::op(SymbolId f, std::span<const ElementId> args) const {
  std::vector<int> key{f};
  key.insert(key.end(), args.begin(), args.end());
  auto it = table_.find(key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string PartialAlgebra::to_string() const {
  std::string out = "N = " + std::to_string(n_) + "\ncarrier (" + std::to_string(size()) + "):";
  for (const Term& t : names_) out += " [" + afa::to_string(t, sig_) + "]";
  out += "\n";
  for (SymbolId c : sig_.constants()) {
    out += sig_.name(c) + " = [" + afa::to_string(names_[constants_.at(c)], sig_) + "]\n";
  }
  for (SymbolId f : sig_.functions()) {
    for (const auto& [args, value] : defined_.at(f)) {
      out += sig_.name(f) + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) out += ",";
        out += "[" + afa::to_string(names_[args[i]], sig_) + "]";
      }
      out += ") = [" + afa::to_string(names_[value], sig_) + "]\n";
    }
  }
  out += total_ ? "total\n" : "partial\n";
  return out;
}

// ------------------------------------------------------------------ FBTerm

FBTerm FBTerm::element(ElementId e) {
  FBTerm t;
  t.node_ = std::make_shared<const Node>(Node{e, -1, {}, mix(0x51ed27, static_cast<std::size_t>(e)), 0});
  return t;
}

FBTerm FBTerm::node(SymbolId f, std::vector<FBTerm> children) {
  std::size_t h = mix(0x2545f491, static_cast<std::size_t>(f));
  int height = 0;
  for (const FBTerm& c : children) {
    h = mix(h, c.hash());
    height = std::max(height, c.height() + 1);
  }
  FBTerm t;
  t.node_ = std::make_shared<const Node>(Node{-1, f, std::move(children), h, height});
  return t;
}

bool operator==(const FBTerm& a, const FBTerm& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.node_->element != b.node_->element || a.node_->symbol != b.node_->symbol) {
    return false;
  }
  auto ac = a.children();
  auto bc = b.children();
  return std::equal(ac.begin(), ac.end(), bc.begin(), bc.end());
}

FBTerm apply(const PartialAlgebra& b, SymbolId f, std::vector<FBTerm> args) {
  if (static_cast<int>(args.size()) != b.signature().arity(f)) {
    throw Error(ErrorKind::ArityMismatch, "'" + b.signature().name(f) + "' expects " +
                                              std::to_string(b.signature().arity(f)) + " arguments");
  }
  if (std::all_of(args.begin(), args.end(), [](const FBTerm& x) { return x.is_element(); })) {
    std::vector<ElementId> ids;
    for (const FBTerm& x : args) ids.push_back(x.element());
    if (auto v = b.op(f, ids)) return FBTerm::element(*v);
  }
  return FBTerm::node(f, std::move(args));
}

FBTerm normalize(const PartialAlgebra& b, const Term& t) {
  if (t.is_constant()) return FBTerm::element(b.constant(t.symbol()));
  std::vector<FBTerm> kids;
  for (const Term& c : t.children()) kids.push_back(normalize(b, c));
  return apply(b, t.symbol(), std::move(kids));
}

FBTerm normalize(const PartialAlgebra& b, const FBTerm& t) {
  if (t.is_element()) return t;
  std::vector<FBTerm> kids;
  for (const FBTerm& c : t.children()) kids.push_back(normalize(b, c));
  return apply(b, t.symbol(), std::move(kids));
}

bool is_f(const PartialAlgebra&, const FBTerm& x, SymbolId f) { return !x.is_element() && x.symbol() == f; }

Term to_ground(const PartialAlgebra& b, const FBTerm& x) {
  if (x.is_element()) return b.name(x.element());
  std::vector<Term> kids;
  for (const FBTerm& c : x.children()) kids.push_back(to_ground(b, c));
  return Term(x.symbol(), std::move(kids));
}

std::string to_string(const FBTerm& x, const PartialAlgebra& b) {
  if (x.is_element()) return "[" + to_string(b.name(x.element()), b.signature()) + "]";
  std::string out = b.signature().name(x.symbol()) + "(";
  bool first = true;
  for (const FBTerm& c : x.children()) {
    if (!first) out += ",";
    first = false;
    out += to_string(c, b);
  }
  return out + ")";
}

std::vector<FBTerm> enumerate_fb_terms(const PartialAlgebra& b, int h, std::size_t limit) {
  std::vector<FBTerm> all;
  for (ElementId e = 0; e < b.size(); ++e) all.push_back(FBTerm::element(e));
  std::size_t level_start = 0;
  std::size_t prev_end = all.size();
  for (int k = 1; k <= h; ++k) {
    std::vector<FBTerm> fresh;
    for (SymbolId f : b.signature().functions()) {
      int arity = b.signature().arity(f);
      for_each_tuple(static_cast<int>(prev_end), arity, [&](const std::vector<int>& tuple) {
        bool tall = std::any_of(tuple.begin(), tuple.end(), [&](int i) { return static_cast<std::size_t>(i) >= level_start; });
        if (!tall) return;
        std::vector<FBTerm> kids;
        for (int i : tuple) kids.push_back(all[i]);
        FBTerm t = apply(b, f, std::move(kids));
        if (t.is_element()) return;
        fresh.push_back(std::move(t));
        if (all.size() + fresh.size() > limit) {
          throw Error(ErrorKind::BudgetExhausted, "F(B)-term enumeration exceeds limit");
        }
      });
    }
    level_start = prev_end;
    all.insert(all.end(), fresh.begin(), fresh.end());
    prev_end = all.size();
  }
  return all;
}

}  // namespace afa
