#include "afa/oracle.hpp"

#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace afa {

namespace {

using SideIndex = std::unordered_map<Term, std::vector<Term>>;

// Calls emit(u) for every u with t ->_Γ u in one step.
void rewrites(const SideIndex& sides, const Term& t, const std::function<void(const Term&)>& emit) {
  if (auto it = sides.find(t); it != sides.end()) {
    for (const Term& to : it->second) emit(to);
  }
  auto kids = t.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    rewrites(sides, kids[i], [&](const Term& u) {
      std::vector<Term> copy(kids.begin(), kids.end());
      copy[i] = u;
      emit(Term(t.symbol(), std::move(copy)));
    });
  }
}

struct Search {
  std::vector<Term> found;
  bool saturated = false;
  bool hit = false;
};

// Explores the class of `s`; stops early when `target` is reached.
Search explore(const EquationSet& gamma, const Term& s, const Term* target, const RewriteBudget& b) {
  Search out;
  SideIndex sides;
  for (const Equation& e : gamma) {
    sides[e.lhs].push_back(e.rhs);
    sides[e.rhs].push_back(e.lhs);
  }
  std::unordered_set<Term> seen{s};
  std::deque<Term> queue{s};
  out.found.push_back(s);
  if (target && s == *target) {
    out.hit = true;
    return out;
  }
  bool pruned = false;
  std::size_t steps = 0;
  while (!queue.empty()) {
    if (steps++ >= b.max_steps) return out;
    Term cur = queue.front();
    queue.pop_front();
    bool done = false;
    rewrites(sides, cur, [&](const Term& next) {
      if (done) return;
      if (next.height() > b.max_height) {
        pruned = true;
        return;
      }
      if (!seen.insert(next).second) return;
      out.found.push_back(next);
      if (target && next == *target) {
        out.hit = done = true;
        return;
      }
      queue.push_back(next);
    });
    if (done) return out;
  }
  out.saturated = !pruned;
  return out;
}

}  // namespace

const char* to_string(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::Equal: return "equal";
    case OracleVerdict::NotEqual: return "not-equal";
    case OracleVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

OracleVerdict rewrite_oracle(const EquationSet& gamma, const Term& s, const Term& t, const RewriteBudget& b) {
  Search r = explore(gamma, s, &t, b);
  if (r.hit) return OracleVerdict::Equal;
  return r.saturated ? OracleVerdict::NotEqual : OracleVerdict::Unknown;
}

ClassClosure class_closure(const EquationSet& gamma, const Term& t, const RewriteBudget& b) {
  Search r = explore(gamma, t, nullptr, b);
  return {std::move(r.found), r.saturated};
}

}  // namespace afa
