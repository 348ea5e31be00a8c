#include "afa/canonical.hpp"

#include <algorithm>

namespace afa {

Presentation::Presentation(Problem p) : cong_(std::move(p)) {
  const Signature& sig = cong_.signature();
  TermLess less{&sig};

  // Group equation sides by e-class; sides are interned, so find_class hits.
  std::map<int, std::vector<Term>> by_class;
  for (const Term& side : cong_.equations().sides()) by_class[*cong_.find_class(side)].push_back(side);

  std::vector<std::pair<Term, int>> order;
  for (auto& [cls, members] : by_class) {
    std::sort(members.begin(), members.end(), less);
    order.emplace_back(members.front(), cls);
  }
  std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) { return less(x.first, y.first); });

  class_type_.assign(static_cast<std::size_t>(cong_.class_count()), 0);
  for (const auto& [rep, cls] : order) {
    types_.representatives.push_back(rep);
    types_.components.push_back(by_class[cls]);
    type_class_.push_back(cls);
    class_type_[cls] = types_.count();
  }
}

std::optional<int> Presentation::type_of_class(int eclass) const {
  int t = class_type_[eclass];
  if (t == 0) return std::nullopt;
  return t;
}

std::optional<int> Presentation::type_of(const Term& t) const {
  auto c = cong_.find_class(t);
  if (!c) return std::nullopt;
  return type_of_class(*c);
}

namespace {

// Class of every subterm, computed once bottom-up.
class ClassMemo {
 public:
  explicit ClassMemo(const Congruence& c) : c_(c) {}

  std::optional<int> operator()(const Term& t) {
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    std::optional<int> out;
    std::vector<int> kids;
    bool ok = true;
    for (const Term& ch : t.children()) {
      auto k = (*this)(ch);
      if (!k) {
        ok = false;
        break;
      }
      kids.push_back(*k);
    }
    if (ok) out = c_.apply(t.symbol(), kids);
    memo_.emplace(t, out);
    return out;
  }

 private:
  const Congruence& c_;
  std::unordered_map<Term, std::optional<int>> memo_;
};

}  // namespace

ReducedTree Presentation::reduced_rep(const Term& t) const {
  ClassMemo cls(cong_);
  ReducedTree out;
  Position at;
  auto walk = [&](auto&& self, const Term& u) -> void {
    if (!at.empty()) {
      if (auto c = cls(u); c && class_type_[*c] != 0) {
        out.emplace(at, ReducedLabel{true, class_type_[*c]});
        return;
      }
    }
    out.emplace(at, ReducedLabel{false, u.symbol()});
    for (std::size_t i = 0; i < u.arity(); ++i) {
      at.push_back(static_cast<int>(i));
      self(self, u.child(i));
      at.pop_back();
    }
  };
  walk(walk, t);
  return out;
}

Term Presentation::canonical_rep(const Term& t) const {
  ClassMemo cls(cong_);
  std::unordered_map<Term, Term> memo;
  auto rep = [&](auto&& self, const Term& u) -> Term {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    Term out = u;
    if (auto c = cls(u); c && class_type_[*c] != 0) {
      out = types_.representatives[class_type_[*c] - 1];
    } else if (!u.is_constant()) {
      std::vector<Term> kids;
      for (const Term& ch : u.children()) kids.push_back(self(self, ch));
      out = Term(u.symbol(), std::move(kids));
    }
    memo.emplace(u, out);
    return out;
  };
  return rep(rep, t);
}

std::string to_string(const ReducedTree& r, const Signature& sig) {
  std::string out = "{";
  bool first = true;
  for (const auto& [pos, label] : r) {
    if (!first) out += ", ";
    first = false;
    out += format_position(pos, sig.max_arity()) + "->";
    out += label.is_type ? "type-" + std::to_string(label.value) : sig.name(label.value);
  }
  return out + "}";
}

TypeAssignment compute_types(const Problem& p) { return Presentation(p).types(); }

std::optional<int> type_of(const Problem& p, const Term& t) { return Presentation(p).type_of(t); }

ReducedTree reduced_rep(const Problem& p, const Term& t) { return Presentation(p).reduced_rep(t); }

Term canonical_rep(const Problem& p, const Term& t) { return Presentation(p).canonical_rep(t); }

}  // namespace afa
