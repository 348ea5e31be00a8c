#pragma once

// A presentation (Σ, Γ): a signature plus finitely many ground equations.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "afa/term.hpp"

namespace afa {

struct Equation {
  Term lhs;
  Term rhs;
};

class EquationSet {
 public:
  EquationSet() = default;
  explicit EquationSet(std::vector<Equation> eqs) : eqs_(std::move(eqs)) {}

  void add(Term lhs, Term rhs) { eqs_.push_back({std::move(lhs), std::move(rhs)}); }

  const std::vector<Equation>& equations() const { return eqs_; }
  std::size_t size() const { return eqs_.size(); }
  bool empty() const { return eqs_.empty(); }

  auto begin() const { return eqs_.begin(); }
  auto end() const { return eqs_.end(); }

  /// Distinct equation sides in first-occurrence order (lhs before rhs).
  std::vector<Term> sides() const;
  /// Greatest height of any side; 0 for the empty set.
  int max_height() const;

 private:
  std::vector<Equation> eqs_;
};

struct Problem {
  Signature signature;
  EquationSet equations;
};

/// Problem file: `fun`/`const` statements and `eq <term> = <term>` lines,
/// all separated by ';'.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::string& path);

/// Inverse of parse_problem for generated presentations.
std::string to_string(const Problem& p);

}  // namespace afa
