#pragma once

// Random formulas over a partial algebra for property tests.

#include <string>
#include <vector>

#include "afa/formula.hpp"
#include "support/generators.hpp"

namespace afa::test {

inline OpenTerm random_open_term(Rng& rng, const PartialAlgebra& b, const std::vector<std::string>& vars, int depth) {
  const Signature& sig = b.signature();
  int roll = uniform(rng, 0, 9);
  if (depth > 0 && roll < 4 && !sig.functions().empty()) {
    SymbolId f = pick(rng, sig.functions());
    std::vector<OpenTerm> args;
    for (int i = 0; i < sig.arity(f); ++i) args.push_back(random_open_term(rng, b, vars, depth - 1));
    return OpenTerm::app(b, f, std::move(args));
  }
  if (!vars.empty() && roll < 8) return OpenTerm::var(pick(rng, vars));
  if (roll == 9) return OpenTerm::elem(uniform(rng, 0, b.size() - 1));
  return OpenTerm::elem(b.constant(pick(rng, sig.constants())));
}

inline Formula random_literal(Rng& rng, const PartialAlgebra& b, const std::vector<std::string>& vars, int depth) {
  const Signature& sig = b.signature();
  int roll = uniform(rng, 0, 9);
  if (roll < 2 && !sig.functions().empty()) {
    Formula t = Formula::is(pick(rng, sig.functions()), random_open_term(rng, b, vars, depth));
    return roll == 0 ? t : negate_literal(t);
  }
  OpenTerm s = random_open_term(rng, b, vars, depth);
  OpenTerm t = random_open_term(rng, b, vars, depth);
  return roll < 6 ? Formula::eq(s, t) : Formula::neq(s, t);
}

struct FormulaShape {
  int quantifier_depth = 2;
  int term_depth = 2;
  int connective_depth = 2;
  bool existential_only = false;
  bool allow_not = true;
};

/// `vars` are in scope; quantifiers draw names from `pool` in order.
inline Formula random_formula(Rng& rng, const PartialAlgebra& b, std::vector<std::string> vars,
                              const std::vector<std::string>& pool, FormulaShape shape, int level = 0) {
  int roll = uniform(rng, 0, 9);
  if (shape.quantifier_depth > 0 && level < static_cast<int>(pool.size()) && roll < 4) {
    std::string y = pool[level];
    vars.push_back(y);
    FormulaShape inner = shape;
    --inner.quantifier_depth;
    Formula body = random_formula(rng, b, vars, pool, inner, level + 1);
    bool ex = shape.existential_only || uniform(rng, 0, 1) == 0;
    return ex ? Formula::exists({y}, body) : Formula::forall({y}, body);
  }
  if (shape.connective_depth > 0 && roll < 8) {
    FormulaShape inner = shape;
    --inner.connective_depth;
    Formula l = random_formula(rng, b, vars, pool, inner, level);
    Formula r = random_formula(rng, b, vars, pool, inner, level);
    if (shape.allow_not && roll == 7) return Formula::negation(Formula::conj({l, r}));
    return roll < 6 ? Formula::conj({l, r}) : Formula::disj({l, r});
  }
  return random_literal(rng, b, vars, shape.term_depth);
}

}  // namespace afa::test
