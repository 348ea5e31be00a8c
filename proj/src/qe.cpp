#include "afa/qe.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>

#include "afa/error.hpp"

namespace afa {

namespace {

using Tuple = std::vector<ElementId>;
using Lits = std::vector<Formula>;

bool is_tester(const Formula& f) { return f.kind() == FormulaKind::Is || f.kind() == FormulaKind::NotIs; }

bool is_atom_pair(const Formula& f) { return f.kind() == FormulaKind::Eq || f.kind() == FormulaKind::Neq; }

bool contains(const std::vector<std::string>& vs, const std::string& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

bool mentions(const Formula& f, const std::vector<std::string>& ys) {
  return std::any_of(f.free().begin(), f.free().end(), [&](const std::string& v) { return contains(ys, v); });
}

bool has_stuck(const OpenTerm& t, const std::set<std::string>& stuck) {
  return std::any_of(t.vars().begin(), t.vars().end(), [&](const std::string& v) { return stuck.count(v) > 0; });
}

/// First variable of a literal, left to right.
std::string first_var(const Formula& lit) {
  if (!lit.lhs().vars().empty()) return lit.lhs().vars().front();
  return lit.rhs().vars().front();
}

/// Conditions on the other variables under which s = t holds once y takes
/// an arbitrarily tall value: nullopt when it then fails.
std::optional<Lits> residual(const OpenTerm& s, const OpenTerm& t, const std::string& y) {
  bool in_s = s.contains(y);
  bool in_t = t.contains(y);
  if (!in_s && !in_t) return Lits{Formula::eq(s, t)};
  if (s == t) return Lits{};
  if (in_s != in_t || !s.is_app() || !t.is_app() || s.symbol() != t.symbol()) return std::nullopt;
  Lits out;
  for (std::size_t i = 0; i < s.args().size(); ++i) {
    auto r = residual(s.args()[i], t.args()[i], y);
    if (!r) return std::nullopt;
    out.insert(out.end(), r->begin(), r->end());
  }
  return out;
}

/// Variable and element of a literal v = e or e = v.
std::optional<std::pair<std::string, ElementId>> var_elem(const Formula& l, FormulaKind kind) {
  if (l.kind() != kind) return std::nullopt;
  if (l.lhs().is_var() && l.rhs().is_elem()) return std::pair{l.lhs().name(), l.rhs().element()};
  if (l.rhs().is_var() && l.lhs().is_elem()) return std::pair{l.rhs().name(), l.lhs().element()};
  return std::nullopt;
}

/// ⋁_c (v = c ∧ R) ∨ (⋀_c v ≠ c ∧ R) is R; the last disjunct is not needed
/// when B is total. Applied until no group closes.
Formula merge_cases(const PartialAlgebra& b, const Lits& disjuncts) {
  Formula d = Formula::disj(disjuncts);
  if (d.is_true() || d.is_false()) return d;
  Lits ds = d.kind() == FormulaKind::Or ? Lits(d.parts().begin(), d.parts().end()) : Lits{d};
  auto members = [](const Formula& f) {
    return f.kind() == FormulaKind::And ? Lits(f.parts().begin(), f.parts().end()) : Lits{f};
  };
  struct Group {
    std::vector<bool> cases;
    bool outside = false;
    Lits rest;
    std::vector<std::size_t> rows;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<std::string> vars;
    for (const Formula& f : ds) {
      for (const Formula& m : members(f)) {
        if (auto ve = var_elem(m, FormulaKind::Eq)) vars.insert(ve->first);
      }
    }
    for (const std::string& v : vars) {
      std::map<std::vector<std::size_t>, Group> groups;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        Lits ms = members(ds[i]);
        std::optional<ElementId> value;
        std::vector<bool> excluded(static_cast<std::size_t>(b.size()), false);
        Lits rest;
        for (const Formula& m : ms) {
          auto eq = var_elem(m, FormulaKind::Eq);
          auto ne = var_elem(m, FormulaKind::Neq);
          if (eq && eq->first == v && !value) value = eq->second;
          else if (ne && ne->first == v) excluded[ne->second] = true;
          else rest.push_back(m);
        }
        bool outside = !value && std::all_of(excluded.begin(), excluded.end(), [](bool x) { return x; });
        if (!value && !outside) continue;
        if (value) {
          for (ElementId e = 0; e < b.size(); ++e) {
            if (excluded[e]) rest.push_back(Formula::neq(OpenTerm::var(v), OpenTerm::elem(e)));
          }
        }
        std::vector<std::size_t> key;
        for (const Formula& m : rest) key.push_back(m.hash());
        std::sort(key.begin(), key.end());
        Group& g = groups[key];
        if (g.cases.empty()) {
          g.cases.assign(static_cast<std::size_t>(b.size()), false);
          g.rest = rest;
        }
        if (value) g.cases[*value] = true;
        else g.outside = true;
        g.rows.push_back(i);
      }
      for (auto& [key, g] : groups) {
        bool all = std::all_of(g.cases.begin(), g.cases.end(), [](bool x) { return x; });
        if (!all || !(g.outside || b.total())) continue;
        std::vector<bool> gone(ds.size(), false);
        for (std::size_t i : g.rows) gone[i] = true;
        Lits next;
        for (std::size_t i = 0; i < ds.size(); ++i) {
          if (!gone[i]) next.push_back(ds[i]);
        }
        next.push_back(Formula::conj(g.rest));
        Formula merged = Formula::disj(std::move(next));
        if (merged.is_true() || merged.is_false()) return merged;
        ds = merged.kind() == FormulaKind::Or ? Lits(merged.parts().begin(), merged.parts().end()) : Lits{merged};
        changed = true;
        break;
      }
      if (changed) break;
    }
  }
  return Formula::disj(std::move(ds));
}

}  // namespace

std::string to_string(DomainClass c) {
  switch (c) {
    case DomainClass::Empty: return "empty";
    case DomainClass::ExactlyB: return "exactly-B";
    case DomainClass::Infinite: return "infinite";
  }
  return {};
}

QuantifierDomain classify_domain(const PartialAlgebra& b, std::set<SymbolId> required, std::set<SymbolId> excluded) {
  QuantifierDomain d{std::move(required), std::move(excluded)};
  bool clash = std::any_of(d.required.begin(), d.required.end(), [&](SymbolId f) { return d.excluded.count(f) > 0; });
  if (d.required.size() >= 2 || clash || (!d.required.empty() && b.total())) {
    d.classification = DomainClass::Empty;
  } else if (d.required.empty()) {
    auto fs = b.signature().functions();
    bool all = std::all_of(fs.begin(), fs.end(), [&](SymbolId f) { return d.excluded.count(f) > 0; });
    d.classification = b.total() || all ? DomainClass::ExactlyB : DomainClass::Infinite;
  } else {
    d.classification = DomainClass::Infinite;
  }
  return d;
}

struct QeEngine::Impl {
  Impl(const PartialAlgebra& alg, QeOptions o) : b(alg), opts(o) {
    const Signature& sig = b.signature();
    for (SymbolId f : sig.functions()) {
      auto& dom = domain[f];
      for (const auto& [args, value] : b.defined(f)) {
        dom.push_back(args);
        preimage[{f, value}].push_back(args);
        range[f].push_back(value);
      }
      auto& r = range[f];
      std::sort(r.begin(), r.end());
      r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    for (std::size_t i = 0; i < sig.symbol_count(); ++i) taken.insert(sig.name(static_cast<SymbolId>(i)));
  }

  struct Branch {
    std::vector<std::string> ys;
    Lits todo;
    Lits outer;
    Lits inner;
    std::set<std::string> stuck;
  };

  const PartialAlgebra& b;
  QeOptions opts;
  QeStats stats;
  std::map<SymbolId, std::vector<Tuple>> domain;
  std::map<std::pair<SymbolId, ElementId>, std::vector<Tuple>> preimage;
  std::map<SymbolId, std::vector<ElementId>> range;
  std::set<std::string> taken;
  std::unordered_map<std::string, Formula> standard_memo;
  std::unordered_map<std::string, Formula> univ_memo;

  void tick() {
    if (++stats.steps > opts.budget) {
      throw Error(ErrorKind::BudgetExhausted,
                  "quantifier elimination exceeded its budget of " + std::to_string(opts.budget) + " steps");
    }
  }

  const std::vector<Tuple>& pre(SymbolId f, ElementId v) const {
    static const std::vector<Tuple> none;
    auto it = preimage.find({f, v});
    return it == preimage.end() ? none : it->second;
  }

  std::string fresh(const std::string& base) {
    std::string stem = base;
    auto us = stem.find_last_of('_');
    if (us != std::string::npos && us + 1 < stem.size() &&
        std::all_of(stem.begin() + static_cast<std::ptrdiff_t>(us) + 1, stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      stem.resize(us);
    }
    for (std::size_t k = 1;; ++k) {
      std::string name = stem + "_" + std::to_string(k);
      if (taken.insert(name).second) return name;
    }
  }

  void reserve(const Formula& f) {
    for (const std::string& v : all_vars(f)) taken.insert(v);
  }

  Formula sub(const Formula& f, const std::string& v, const OpenTerm& by) const { return substitute(b, f, v, by); }

  Lits sub_all(const Lits& ls, const std::string& v, const OpenTerm& by) const {
    Lits out;
    for (const Formula& l : ls) out.push_back(sub(l, v, by));
    return out;
  }

  /// Testers are constant on a total B: nothing lies outside it.
  Formula settle(const Formula& lit) const {
    if (b.total() && is_tester(lit)) return Formula::truth(lit.kind() == FormulaKind::NotIs);
    if (lit.free().empty() && !lit.is_true() && !lit.is_false()) return Formula::truth(evaluate_qf(b, lit, {}));
    return lit;
  }

  Formula not_in_b(const OpenTerm& z) const {
    Lits parts;
    for (ElementId c = 0; c < b.size(); ++c) parts.push_back(Formula::neq(z, OpenTerm::elem(c)));
    return Formula::conj(std::move(parts));
  }

  // to_standard
  void process(Branch br, Lits& out);
  void split_on(const Branch& br, const Formula& lit, const std::string& v, Lits& out);
  void assign(Branch& br, const std::string& v, const OpenTerm& t, bool outer_too);
  Formula finish(Branch& br);

  // negation
  Formula univ(std::vector<std::string> ys, const Lits& d);
  Formula univ_core(const std::vector<std::string>& ys, const Lits& d);

  struct Clause {
    std::vector<std::string> ys;
    Lits lits;
  };
  static std::set<std::string> names_of(const Clause& c);
  bool tidy(Clause& c);
  std::vector<Clause> dnf(const Formula& f);
  Formula ex(std::vector<std::string> ys, const Formula& f);
  Formula standard(const Formula& phi);
  Formula negate(const Formula& phi);
  Formula rename_apart(const Formula& phi, std::set<std::string>& seen, std::map<std::string, std::string>& ren);

  Formula prepare(const Formula& phi) {
    reserve(phi);
    std::set<std::string> seen(phi.free().begin(), phi.free().end());
    std::map<std::string, std::string> ren;
    return rename_apart(phi, seen, ren);
  }
};

// ------------------------------------------------- existential → standard

void QeEngine::Impl::assign(Branch& br, const std::string& v, const OpenTerm& t, bool outer_too) {
  for (Formula& l : br.todo) l = sub(l, v, t);
  auto move_back = [&](Lits& from) {
    Lits keep;
    for (const Formula& l : from) {
      if (std::binary_search(l.free().begin(), l.free().end(), v)) {
        br.todo.push_back(sub(l, v, t));
      } else {
        keep.push_back(l);
      }
    }
    from = std::move(keep);
  };
  move_back(br.inner);
  if (outer_too) move_back(br.outer);
  if (br.stuck.count(v) && t.is_var()) br.stuck.insert(t.name());
  std::erase(br.ys, v);
}

void QeEngine::Impl::split_on(const Branch& br, const Formula& lit, const std::string& v, Lits& out) {
  OpenTerm z = OpenTerm::var(v);
  if (!b.total()) {
    Branch outside = br;
    outside.stuck.insert(v);
    outside.todo.push_back(lit);
    for (ElementId c = 0; c < b.size(); ++c) outside.todo.push_back(Formula::neq(z, OpenTerm::elem(c)));
    process(std::move(outside), out);
  }
  for (ElementId c = 0; c < b.size(); ++c) {
    Branch inside = br;
    inside.todo.push_back(lit);
    inside.todo.push_back(Formula::eq(z, OpenTerm::elem(c)));
    process(std::move(inside), out);
  }
}

void QeEngine::Impl::process(Branch br, Lits& out) {
  while (!br.todo.empty()) {
    tick();
    Formula lit = settle(br.todo.back());
    br.todo.pop_back();
    if (lit.is_true()) continue;
    if (lit.is_false()) return;
    bool bound_free = !mentions(lit, br.ys);
    const bool eq = lit.kind() == FormulaKind::Eq;

    if (bound_free) {
      if (eq && (lit.lhs().is_var() != lit.rhs().is_var()) && (lit.lhs().is_elem() || lit.rhs().is_elem())) {
        const OpenTerm& x = lit.lhs().is_var() ? lit.lhs() : lit.rhs();
        const OpenTerm& c = lit.lhs().is_var() ? lit.rhs() : lit.lhs();
        assign(br, x.name(), c, true);
        br.outer.push_back(Formula::eq(x, c));
      } else {
        br.outer.push_back(lit);
      }
      continue;
    }

    if (is_tester(lit)) {
      const OpenTerm& t = lit.operand();
      if (t.is_var()) {
        br.inner.push_back(lit);
        continue;
      }
      bool positive = lit.kind() == FormulaKind::Is;
      if (t.symbol() != lit.tester()) {
        if (positive) return;
        continue;
      }
      // Is_g(g(s)) holds exactly when g(s) is outside B.
      if (has_stuck(t, br.stuck)) {
        if (!positive) return;
        continue;
      }
      split_on(br, lit, t.vars().front(), out);
      return;
    }

    const OpenTerm& s = lit.lhs();
    const OpenTerm& t = lit.rhs();
    if (s == t) {
      if (eq) continue;
      return;
    }
    auto bound_var = [&](const OpenTerm& u) { return u.is_var() && contains(br.ys, u.name()); };
    auto solved_side = [&](const OpenTerm& u, const OpenTerm& other) { return u.is_var() && !other.contains(u.name()); };

    if (eq) {
      if (bound_var(s) && !t.contains(s.name())) {
        assign(br, s.name(), t, false);
        continue;
      }
      if (bound_var(t) && !s.contains(t.name())) {
        assign(br, t.name(), s, false);
        continue;
      }
      if (s.is_var() || t.is_var()) {
        const OpenTerm& z = s.is_var() ? s : t;
        const OpenTerm& u = s.is_var() ? t : s;
        if (u.contains(z.name())) {
          // z = u[z] forces z, and with it u, into B.
          if (br.stuck.count(z.name())) return;
          for (ElementId c = 0; c < b.size(); ++c) {
            Branch alt = br;
            alt.todo.push_back(lit);
            alt.todo.push_back(Formula::eq(z, OpenTerm::elem(c)));
            process(std::move(alt), out);
          }
          return;
        }
        Formula solved = Formula::eq(z, u);
        for (Formula& l : br.todo) l = sub(l, z.name(), u);
        Lits keep;
        for (const Formula& l : br.inner) {
          if (std::binary_search(l.free().begin(), l.free().end(), z.name())) {
            br.todo.push_back(sub(l, z.name(), u));
          } else {
            keep.push_back(l);
          }
        }
        br.inner = std::move(keep);
        br.inner.push_back(solved);
        continue;
      }
      if (s.is_elem() || t.is_elem()) {
        const OpenTerm& c = s.is_elem() ? s : t;
        const OpenTerm& u = s.is_elem() ? t : s;
        if (has_stuck(u, br.stuck)) return;
        for (const Tuple& args : pre(u.symbol(), c.element())) {
          Branch alt = br;
          for (std::size_t i = 0; i < args.size(); ++i) {
            alt.todo.push_back(Formula::eq(u.args()[i], OpenTerm::elem(args[i])));
          }
          process(std::move(alt), out);
        }
        return;
      }
      // Both sides are applications.
      if (s.symbol() == t.symbol()) {
        Branch alt = br;
        for (std::size_t i = 0; i < s.args().size(); ++i) alt.todo.push_back(Formula::eq(s.args()[i], t.args()[i]));
        process(std::move(alt), out);
      }
      if (has_stuck(s, br.stuck) || has_stuck(t, br.stuck)) return;
      for (ElementId v = 0; v < b.size(); ++v) {
        for (const Tuple& cs : pre(s.symbol(), v)) {
          for (const Tuple& ds : pre(t.symbol(), v)) {
            if (s.symbol() == t.symbol() && cs == ds) continue;
            Branch alt = br;
            for (std::size_t i = 0; i < cs.size(); ++i) alt.todo.push_back(Formula::eq(s.args()[i], OpenTerm::elem(cs[i])));
            for (std::size_t i = 0; i < ds.size(); ++i) alt.todo.push_back(Formula::eq(t.args()[i], OpenTerm::elem(ds[i])));
            process(std::move(alt), out);
          }
        }
      }
      return;
    }

    // Disequations.
    if (solved_side(s, t) || solved_side(t, s)) {
      br.inner.push_back(solved_side(s, t) ? lit : Formula::neq(t, s));
      continue;
    }
    if (s.is_var() || t.is_var()) {
      // z ≠ u[z]: true when z lies outside B, otherwise try each value.
      const OpenTerm& z = s.is_var() ? s : t;
      if (br.stuck.count(z.name())) continue;
      split_on(br, lit, z.name(), out);
      return;
    }
    if (s.is_elem() || t.is_elem()) {
      const OpenTerm& u = s.is_elem() ? t : s;
      if (has_stuck(u, br.stuck)) continue;
      split_on(br, lit, u.vars().front(), out);
      return;
    }
    if (has_stuck(s, br.stuck) || has_stuck(t, br.stuck)) {
      // One side lies outside B, so only its own shape can match it.
      if (s.symbol() != t.symbol()) continue;
      for (std::size_t i = 0; i < s.args().size(); ++i) {
        Branch alt = br;
        alt.todo.push_back(Formula::neq(s.args()[i], t.args()[i]));
        process(std::move(alt), out);
      }
      return;
    }
    split_on(br, lit, first_var(lit), out);
    return;
  }
  Formula done = finish(br);
  if (!done.is_false()) out.push_back(std::move(done));
}

Formula QeEngine::Impl::finish(Branch& br) {
  std::vector<std::string> ys;
  for (const std::string& y : br.ys) {
    if (std::any_of(br.inner.begin(), br.inner.end(), [&](const Formula& l) { return mentions(l, {y}); })) ys.push_back(y);
  }
  Lits parts = br.outer;
  if (br.inner.empty()) return Formula::conj(std::move(parts));
  Formula special = Formula::exists(ys, Formula::conj(br.inner));
  if (special.free().empty()) {
    Lits negated;
    for (const Formula& l : br.inner) negated.push_back(negate_literal(l));
    Formula u = univ(ys, negated);
    if (!u.is_true() && !u.is_false()) throw Error(ErrorKind::Syntax, "closed special did not reduce to a truth value");
    if (u.is_true()) return Formula::truth(false);
    return Formula::conj(std::move(parts));
  }
  // Without equations a disequation rules out finitely many values of the
  // last bound variable it mentions, so only the tester domains matter.
  if (std::none_of(br.inner.begin(), br.inner.end(), [](const Formula& l) { return l.kind() == FormulaKind::Eq; })) {
    for (const std::string& y : ys) {
      std::set<SymbolId> required, excluded;
      for (const Formula& l : br.inner) {
        bool tester = l.kind() == FormulaKind::Is || l.kind() == FormulaKind::NotIs;
        if (!tester || !l.operand().is_var() || l.operand().name() != y) continue;
        (l.kind() == FormulaKind::Is ? required : excluded).insert(l.tester());
      }
      DomainClass c = classify_domain(b, required, excluded).classification;
      if (c == DomainClass::Empty) return Formula::truth(false);
      if (c == DomainClass::ExactlyB) {
        Lits alts;
        for (ElementId e = 0; e < b.size(); ++e) {
          Lits lits;
          for (const Formula& l : br.inner) lits.push_back(settle(sub(l, y, OpenTerm::elem(e))));
          alts.push_back(ex(ys, Formula::conj(std::move(lits))));
        }
        parts.push_back(Formula::disj(std::move(alts)));
        return Formula::conj(std::move(parts));
      }
    }
    return Formula::conj(std::move(parts));
  }
  // ∃z̄ x = f(z̄) with distinct z̄ says x is f-rooted or in the range of f.
  if (br.inner.size() == 1 && br.inner[0].kind() == FormulaKind::Eq && br.inner[0].rhs().is_app()) {
    const OpenTerm& rhs = br.inner[0].rhs();
    bool pattern = rhs.args().size() == ys.size();
    for (const OpenTerm& a : rhs.args()) pattern = pattern && a.is_var() && contains(ys, a.name());
    if (pattern && rhs.vars().size() == ys.size()) {
      const OpenTerm& x = br.inner[0].lhs();
      Lits alts;
      if (!b.total()) alts.push_back(Formula::is(rhs.symbol(), x));
      for (ElementId v : range[rhs.symbol()]) alts.push_back(Formula::eq(x, OpenTerm::elem(v)));
      parts.push_back(Formula::disj(std::move(alts)));
      return Formula::conj(std::move(parts));
    }
  }
  parts.push_back(special);
  return Formula::conj(std::move(parts));
}

// ------------------------------------------- ∀ȳ over a disjunction of literals

Formula QeEngine::Impl::univ(std::vector<std::string> ys, const Lits& d) {
  tick();
  Lits lits;
  for (const Formula& raw : d) {
    Formula l = settle(raw);
    if (l.is_true()) return l;
    if (l.is_false()) continue;
    if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
  }
  std::erase_if(ys, [&](const std::string& y) {
    return std::none_of(lits.begin(), lits.end(), [&](const Formula& l) { return mentions(l, {y}); });
  });
  Lits outside;
  Lits inside;
  for (const Formula& l : lits) (mentions(l, ys) ? inside : outside).push_back(l);
  if (inside.empty()) return Formula::disj(std::move(outside));

  std::vector<std::pair<std::string, Formula>> keyed;
  for (const Formula& l : inside) keyed.emplace_back(to_string(l, b), l);
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::string key;
  for (const std::string& y : ys) key += y + ",";
  key += ":";
  inside.clear();
  for (auto& [text, l] : keyed) {
    key += text + ";";
    inside.push_back(l);
  }
  Formula core = Formula::truth(false);
  if (auto it = univ_memo.find(key); it != univ_memo.end()) {
    ++stats.memo_hits;
    core = it->second;
  } else {
    core = univ_core(ys, inside);
    univ_memo.emplace(key, core);
  }
  outside.push_back(core);
  return Formula::disj(std::move(outside));
}

Formula QeEngine::Impl::univ_core(const std::vector<std::string>& ys, const Lits& d) {
  auto without = [&](std::size_t k) {
    Lits rest;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i != k) rest.push_back(d[i]);
    }
    return rest;
  };
  auto minus = [&](const std::string& y) {
    std::vector<std::string> out = ys;
    std::erase(out, y);
    return out;
  };
  auto each_value = [&](const std::vector<std::string>& zs, const Lits& ls, const std::string& v) {
    Lits parts;
    for (ElementId c = 0; c < b.size(); ++c) parts.push_back(univ(zs, sub_all(ls, v, OpenTerm::elem(c))));
    return Formula::conj(std::move(parts));
  };

  for (std::size_t k = 0; k < d.size(); ++k) {
    const Formula& lit = d[k];
    if (lit.kind() != FormulaKind::Neq) continue;
    const OpenTerm& s = lit.lhs();
    const OpenTerm& t = lit.rhs();
    Lits rest = without(k);
    if (s == t) return univ(ys, rest);
    auto bound = [&](const OpenTerm& u) { return u.is_var() && contains(ys, u.name()); };

    // ∀y (y ≠ t ∨ φ) ⟷ φ[y/t] when y does not occur in t.
    if (bound(s) && !t.contains(s.name())) return univ(minus(s.name()), sub_all(rest, s.name(), t));
    if (bound(t) && !s.contains(t.name())) return univ(minus(t.name()), sub_all(rest, t.name(), s));
    if (bound(s) || bound(t)) {
      // y ≠ u[y] holds for every y outside B.
      const std::string& y = bound(s) ? s.name() : t.name();
      return each_value(minus(y), d, y);
    }
    if (s.is_var() || t.is_var()) {
      const OpenTerm& x = s.is_var() ? s : t;
      const OpenTerm& u = s.is_var() ? t : s;
      Lits alts;
      if (!b.total()) {
        Lits outside = {not_in_b(x)};
        if (!u.contains(x.name())) outside.push_back(Formula::not_is(u.symbol(), x));
        if (u.contains(x.name())) alts.push_back(not_in_b(x));
        else alts.push_back(Formula::conj(std::move(outside)));
      }
      for (ElementId c = 0; c < b.size(); ++c) {
        OpenTerm e = OpenTerm::elem(c);
        alts.push_back(Formula::conj({Formula::eq(x, e), univ(ys, sub_all(d, x.name(), e))}));
      }
      if (!u.contains(x.name()) && !b.total()) {
        // x = f(z̄) outside B: x ≠ f(ū) reduces to z̄ ≠ ū componentwise.
        std::vector<std::string> zs;
        std::vector<OpenTerm> zt;
        for (std::size_t i = 0; i < u.args().size(); ++i) {
          zs.push_back(fresh("z"));
          zt.push_back(OpenTerm::var(zs.back()));
        }
        OpenTerm fz = OpenTerm::raw_app(u.symbol(), zt);
        Lits inner = sub_all(rest, x.name(), fz);
        for (std::size_t i = 0; i < zt.size(); ++i) inner.push_back(Formula::neq(zt[i], u.args()[i]));
        alts.push_back(Formula::exists(
            zs, Formula::conj({Formula::is(u.symbol(), x), Formula::eq(x, fz), univ(ys, inner)})));
      }
      return Formula::disj(std::move(alts));
    }
    if (s.is_elem() || t.is_elem()) {
      const OpenTerm& c = s.is_elem() ? s : t;
      const OpenTerm& u = s.is_elem() ? t : s;
      Lits parts;
      for (const Tuple& args : pre(u.symbol(), c.element())) {
        Lits next = rest;
        for (std::size_t i = 0; i < args.size(); ++i) next.push_back(Formula::neq(u.args()[i], OpenTerm::elem(args[i])));
        parts.push_back(univ(ys, next));
      }
      return Formula::conj(std::move(parts));
    }
    Lits parts;
    if (s.symbol() == t.symbol()) {
      Lits next = rest;
      for (std::size_t i = 0; i < s.args().size(); ++i) next.push_back(Formula::neq(s.args()[i], t.args()[i]));
      parts.push_back(univ(ys, next));
    }
    for (ElementId v = 0; v < b.size(); ++v) {
      for (const Tuple& cs : pre(s.symbol(), v)) {
        for (const Tuple& ds : pre(t.symbol(), v)) {
          if (s.symbol() == t.symbol() && cs == ds) continue;
          Lits next = rest;
          for (std::size_t i = 0; i < cs.size(); ++i) next.push_back(Formula::neq(s.args()[i], OpenTerm::elem(cs[i])));
          for (std::size_t i = 0; i < ds.size(); ++i) next.push_back(Formula::neq(t.args()[i], OpenTerm::elem(ds[i])));
          parts.push_back(univ(ys, next));
        }
      }
    }
    return Formula::conj(std::move(parts));
  }

  for (std::size_t k = 0; k < d.size(); ++k) {
    const Formula& lit = d[k];
    if (!is_tester(lit) || lit.operand().is_var()) continue;
    const OpenTerm& t = lit.operand();
    Lits rest = without(k);
    if (lit.kind() == FormulaKind::Is) {
      if (t.symbol() != lit.tester()) return univ(ys, rest);
      // Is_g(g(s̄)) fails exactly on the defined tuples.
      Lits parts;
      for (const Tuple& args : domain[t.symbol()]) {
        Lits next = rest;
        for (std::size_t i = 0; i < args.size(); ++i) next.push_back(Formula::neq(t.args()[i], OpenTerm::elem(args[i])));
        parts.push_back(univ(ys, next));
      }
      return Formula::conj(std::move(parts));
    }
    if (t.symbol() != lit.tester()) return Formula::truth(true);
    for (ElementId c = 0; c < b.size(); ++c) rest.push_back(Formula::eq(t, OpenTerm::elem(c)));
    return univ(ys, rest);
  }

  // Only equations and testers on bound variables remain.
  const std::string& y = ys.front();
  std::set<SymbolId> required;
  std::set<SymbolId> excluded;
  for (const Formula& lit : d) {
    if (!is_tester(lit) || lit.operand().name() != y) continue;
    (lit.kind() == FormulaKind::NotIs ? required : excluded).insert(lit.tester());
  }
  QuantifierDomain dom = classify_domain(b, required, excluded);
  switch (dom.classification) {
    case DomainClass::Empty: ++stats.empty_domains; return Formula::truth(true);
    case DomainClass::ExactlyB: ++stats.b_domains; return each_value(minus(y), d, y);
    case DomainClass::Infinite: ++stats.infinite_domains; break;
  }
  // A tall enough y falsifies its testers and reduces each equation to
  // conditions on the other variables.
  std::vector<Lits> clauses{{}};
  for (const Formula& lit : d) {
    if (is_tester(lit) && lit.operand().is_var() && lit.operand().name() == y) continue;
    if (lit.kind() != FormulaKind::Eq || !mentions(lit, {y})) {
      for (Lits& c : clauses) c.push_back(lit);
      continue;
    }
    auto r = residual(lit.lhs(), lit.rhs(), y);
    if (!r) continue;
    if (r->empty()) return Formula::truth(true);
    std::vector<Lits> next;
    for (const Lits& c : clauses) {
      for (const Formula& e : *r) {
        next.push_back(c);
        next.back().push_back(e);
        tick();
      }
    }
    clauses = std::move(next);
  }
  Lits parts;
  for (const Lits& c : clauses) parts.push_back(univ(minus(y), c));
  return Formula::conj(std::move(parts));
}

// ------------------------------------------------------------ composition

std::set<std::string> QeEngine::Impl::names_of(const Clause& c) {
  std::set<std::string> out(c.ys.begin(), c.ys.end());
  for (const Formula& l : c.lits) out.insert(l.free().begin(), l.free().end());
  return out;
}

bool QeEngine::Impl::tidy(Clause& c) {
  for (std::size_t i = 0; i < c.lits.size(); ++i) {
    const Formula l = c.lits[i];
    if (l.kind() != FormulaKind::Eq) continue;
    const OpenTerm& x = l.lhs().is_var() ? l.lhs() : l.rhs();
    const OpenTerm& e = l.lhs().is_var() ? l.rhs() : l.lhs();
    if (!x.is_var() || !e.is_elem() || contains(c.ys, x.name())) continue;
    for (std::size_t j = 0; j < c.lits.size(); ++j) {
      if (j != i) c.lits[j] = sub(c.lits[j], x.name(), e);
    }
  }
  Lits kept;
  for (const Formula& raw : c.lits) {
    Formula l = settle(raw);
    if (l.is_false()) return false;
    if (l.is_true() || std::find(kept.begin(), kept.end(), l) != kept.end()) continue;
    kept.push_back(l);
  }
  for (const Formula& l : kept) {
    if (std::find(kept.begin(), kept.end(), negate_literal(l)) != kept.end()) return false;
  }
  c.lits = std::move(kept);
  return true;
}

std::vector<QeEngine::Impl::Clause> QeEngine::Impl::dnf(const Formula& f) {
  tick();
  auto rename = [&](Clause& c, const std::set<std::string>& clash) {
    for (std::string& y : c.ys) {
      if (!clash.count(y)) continue;
      std::string n = fresh(y);
      c.lits = sub_all(c.lits, y, OpenTerm::var(n));
      y = n;
    }
  };
  switch (f.kind()) {
    case FormulaKind::True: return {Clause{}};
    case FormulaKind::False: return {};
    case FormulaKind::Or: {
      std::vector<Clause> out;
      for (const Formula& p : f.parts()) {
        for (Clause& c : dnf(p)) out.push_back(std::move(c));
      }
      return out;
    }
    case FormulaKind::And: {
      std::vector<Clause> acc{Clause{}};
      for (const Formula& p : f.parts()) {
        std::vector<Clause> right = dnf(p);
        std::vector<Clause> next;
        for (const Clause& l : acc) {
          for (Clause r : right) {
            tick();
            Clause m = l;
            rename(m, names_of(r));
            rename(r, names_of(m));
            m.ys.insert(m.ys.end(), r.ys.begin(), r.ys.end());
            m.lits.insert(m.lits.end(), r.lits.begin(), r.lits.end());
            if (tidy(m)) next.push_back(std::move(m));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case FormulaKind::Exists: {
      std::vector<Clause> out = dnf(f.body());
      for (Clause& c : out) {
        for (const std::string& v : f.bound()) {
          if (!contains(c.ys, v)) c.ys.push_back(v);
        }
      }
      return out;
    }
    case FormulaKind::Not:
    case FormulaKind::Forall: return dnf(standard(f));
    default: return {Clause{{}, {f}}};
  }
}

Formula QeEngine::Impl::ex(std::vector<std::string> ys, const Formula& f) {
  std::erase_if(ys, [&](const std::string& y) { return !std::binary_search(f.free().begin(), f.free().end(), y); });
  if (ys.empty()) return f;
  tick();
  switch (f.kind()) {
    case FormulaKind::Or: {
      Lits parts;
      for (const Formula& p : f.parts()) parts.push_back(ex(ys, p));
      return merge_cases(b, parts);
    }
    case FormulaKind::Exists: {
      std::vector<std::string> all = ys;
      for (const std::string& z : f.bound()) {
        if (!contains(all, z)) all.push_back(z);
      }
      return ex(std::move(all), f.body());
    }
    default: break;
  }
  std::string key;
  for (const std::string& y : ys) key += y + ",";
  key += ":" + to_string(f, b);
  if (auto it = standard_memo.find(key); it != standard_memo.end()) {
    ++stats.memo_hits;
    return it->second;
  }
  Lits outside;
  Lits inside;
  if (f.kind() == FormulaKind::And) {
    for (const Formula& p : f.parts()) (mentions(p, ys) ? inside : outside).push_back(p);
  } else {
    inside.push_back(f);
  }
  Formula result = Formula::truth(false);
  if (inside.size() == 1 && inside[0].kind() != FormulaKind::Exists && !inside[0].is_literal()) {
    result = ex(ys, inside[0]);
  } else {
    Lits out;
    for (Clause& c : dnf(Formula::conj(inside))) {
      Branch br;
      br.ys = ys;
      for (const std::string& z : c.ys) {
        if (!contains(br.ys, z)) br.ys.push_back(z);
      }
      br.todo.assign(c.lits.rbegin(), c.lits.rend());
      process(std::move(br), out);
    }
    result = merge_cases(b, out);
  }
  outside.push_back(result);
  result = Formula::conj(std::move(outside));
  standard_memo.emplace(std::move(key), result);
  return result;
}

Formula QeEngine::Impl::standard(const Formula& phi) {
  tick();
  switch (phi.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or: {
      Lits parts;
      for (const Formula& p : phi.parts()) parts.push_back(standard(p));
      return phi.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Not: return negate(standard(phi.body()));
    case FormulaKind::Exists: return ex(phi.bound(), standard(phi.body()));
    case FormulaKind::Forall:
      return negate(ex(phi.bound(), negate(standard(phi.body()))));
    default: return settle(phi);
  }
}

Formula QeEngine::Impl::negate(const Formula& phi) {
  tick();
  switch (phi.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or: {
      Lits parts;
      for (const Formula& p : phi.parts()) parts.push_back(negate(p));
      return phi.kind() == FormulaKind::And ? Formula::disj(std::move(parts)) : Formula::conj(std::move(parts));
    }
    case FormulaKind::Not: return standard(phi.body());
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (phi.kind() == FormulaKind::Forall || !is_standard(phi)) {
        Formula st = standard(phi);
        if (st == phi) throw Error(ErrorKind::Syntax, "existential formula did not reach special form");
        return negate(st);
      }
      const Formula& body = phi.body();
      Lits negated;
      if (body.is_literal()) {
        negated.push_back(negate_literal(body));
      } else {
        for (const Formula& l : body.parts()) negated.push_back(negate_literal(l));
      }
      return standard(univ(phi.bound(), negated));
    }
    default: return settle(negate_literal(phi));
  }
}

Formula QeEngine::Impl::rename_apart(const Formula& phi, std::set<std::string>& seen,
                                     std::map<std::string, std::string>& ren) {
  switch (phi.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or: {
      Lits parts;
      for (const Formula& p : phi.parts()) parts.push_back(rename_apart(p, seen, ren));
      return phi.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Not: return Formula::negation(rename_apart(phi.body(), seen, ren));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<std::string> vars;
      Formula body = phi.body();
      for (const std::string& v : phi.bound()) {
        if (seen.insert(v).second) {
          vars.push_back(v);
          continue;
        }
        std::string n = fresh(v);
        seen.insert(n);
        ren[v] = n;
        body = sub(body, v, OpenTerm::var(n));
        vars.push_back(n);
      }
      body = rename_apart(body, seen, ren);
      return phi.kind() == FormulaKind::Exists ? Formula::exists(std::move(vars), std::move(body))
                                               : Formula::forall(std::move(vars), std::move(body));
    }
    default: return phi;
  }
}

// ---------------------------------------------------------------- QeEngine

QeEngine::QeEngine(const PartialAlgebra& b, QeOptions opts) : impl_(std::make_unique<Impl>(b, opts)) {}
QeEngine::~QeEngine() = default;

Formula QeEngine::to_standard(const Formula& phi) { return impl_->standard(impl_->prepare(phi)); }

Formula QeEngine::negate_standard(const Formula& phi) { return impl_->negate(impl_->prepare(phi)); }

Formula QeEngine::eliminate(const Formula& phi) { return impl_->standard(impl_->prepare(phi)); }

bool QeEngine::decide(const Formula& sentence) {
  if (!sentence.free().empty()) {
    throw Error(ErrorKind::UnboundVariable, "sentence has free variable '" + sentence.free().front() + "'");
  }
  Formula r = eliminate(sentence);
  return evaluate_qf(impl_->b, r, {});
}

const QeStats& QeEngine::stats() const { return impl_->stats; }

const PartialAlgebra& QeEngine::algebra() const { return impl_->b; }

Formula to_standard(const PartialAlgebra& b, const Formula& phi, QeOptions opts) {
  return QeEngine(b, opts).to_standard(phi);
}

Formula negate_standard(const PartialAlgebra& b, const Formula& phi, QeOptions opts) {
  return QeEngine(b, opts).negate_standard(phi);
}

Formula eliminate(const PartialAlgebra& b, const Formula& phi, QeOptions opts) {
  return QeEngine(b, opts).eliminate(phi);
}

bool decide_sentence(const PartialAlgebra& b, const Formula& sentence, QeOptions opts) {
  return QeEngine(b, opts).decide(sentence);
}

bool decide_sentence(const Problem& p, std::string_view sentence, QeOptions opts) {
  PartialAlgebra b{Presentation(p)};
  return decide_sentence(b, parse_formula(sentence, b, {false}), opts);
}

// ------------------------------------------------------------ Def 4.2 check

namespace {

std::size_t occurrences(const OpenTerm& t, const std::string& v) {
  if (t.is_var()) return t.name() == v ? 1 : 0;
  std::size_t n = 0;
  for (const OpenTerm& a : t.args()) n += occurrences(a, v);
  return n;
}

bool fail(std::string* why, std::string msg) {
  if (why) *why = std::move(msg);
  return false;
}

bool special_ok(const Formula& phi, std::string* why) {
  const Formula& body = phi.body();
  Lits lits;
  if (body.kind() == FormulaKind::And) {
    lits.assign(body.parts().begin(), body.parts().end());
  } else {
    lits.push_back(body);
  }
  const auto& ys = phi.bound();
  for (const Formula& l : lits) {
    switch (l.kind()) {
      case FormulaKind::Eq: {
        if (!l.lhs().is_var() || contains(ys, l.lhs().name())) return fail(why, "equation without a free variable subject");
        const std::string& x = l.lhs().name();
        if (l.rhs().contains(x)) return fail(why, "variable '" + x + "' occurs in its own equation");
        std::size_t n = 0;
        for (const Formula& m : lits) {
          if (is_atom_pair(m)) n += occurrences(m.lhs(), x) + occurrences(m.rhs(), x);
          if (is_tester(m)) n += occurrences(m.operand(), x);
        }
        if (n != 1) return fail(why, "variable '" + x + "' occurs more than once");
        break;
      }
      case FormulaKind::Neq:
        if (!l.lhs().is_var()) return fail(why, "disequation without a variable subject");
        if (l.rhs().contains(l.lhs().name())) return fail(why, "variable '" + l.lhs().name() + "' occurs in its own disequation");
        break;
      case FormulaKind::Is:
      case FormulaKind::NotIs:
        if (!l.operand().is_var() || !contains(ys, l.operand().name())) return fail(why, "tester on a non-bound term");
        break;
      default: return fail(why, "special body holds a non-literal");
    }
  }
  return true;
}

}  // namespace

bool is_standard(const Formula& phi, std::string* why) {
  if (is_quantifier_free(phi)) return true;
  switch (phi.kind()) {
    case FormulaKind::And:
    case FormulaKind::Or:
      return std::all_of(phi.parts().begin(), phi.parts().end(), [&](const Formula& p) { return is_standard(p, why); });
    case FormulaKind::Exists: return special_ok(phi, why);
    default: return fail(why, "quantifier outside a special formula");
  }
}

}  // namespace afa
