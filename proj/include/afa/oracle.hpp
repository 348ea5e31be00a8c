#pragma once

// Brute-force exploration of ∼_Γ classes by single-step rewriting.

#include <cstddef>
#include <vector>

#include "afa/problem.hpp"
#include "afa/term.hpp"

namespace afa {

struct RewriteBudget {
  std::size_t max_steps = 10000;  // terms expanded
  int max_height = 8;             // rewrites producing taller terms are pruned
};

enum class OracleVerdict { Equal, NotEqual, Unknown };

const char* to_string(OracleVerdict v);

/// Breadth-first search from `s` using equations in both directions at any
/// position. NotEqual only when the search saturated without any pruning.
OracleVerdict rewrite_oracle(const EquationSet& gamma, const Term& s, const Term& t, const RewriteBudget& b);

struct ClassClosure {
  std::vector<Term> members;  // in discovery order, starting with the seed
  bool saturated = false;
};

ClassClosure class_closure(const EquationSet& gamma, const Term& t, const RewriteBudget& b);

}  // namespace afa
