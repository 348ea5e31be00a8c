#pragma once

// Quantifier elimination for F(B) expanded with the tester predicates.
// Existential formulas are rewritten into standard formulas (disjunctions
// of ψ0 ∧ ∃ȳ(special conjunction)), negations of standard formulas are
// rewritten back into existential ones, and the two alternate from the
// innermost quantifier outwards.

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "afa/formula.hpp"
#include "afa/problem.hpp"

namespace afa {

struct QeOptions {
  /// Rewrite steps before BudgetExhausted is thrown.
  std::size_t budget = 2'000'000;
};

struct QeStats {
  std::size_t steps = 0;
  std::size_t memo_hits = 0;
  /// How often each quantifier-domain classification was used.
  std::size_t empty_domains = 0;
  std::size_t b_domains = 0;
  std::size_t infinite_domains = 0;
};

enum class DomainClass { Empty, ExactlyB, Infinite };

/// The set T of elements satisfying Is_f for f in `required` and ¬Is_g for
/// g in `excluded`, classified as empty, exactly B, or infinite.
struct QuantifierDomain {
  std::set<SymbolId> required;
  std::set<SymbolId> excluded;
  DomainClass classification = DomainClass::Infinite;
};

QuantifierDomain classify_domain(const PartialAlgebra& b, std::set<SymbolId> required, std::set<SymbolId> excluded);

std::string to_string(DomainClass c);

/// One engine shares its memo table and step budget across calls. `b` must
/// outlive the engine.
class QeEngine {
 public:
  explicit QeEngine(const PartialAlgebra& b, QeOptions opts = {});
  ~QeEngine();
  QeEngine(const QeEngine&) = delete;
  QeEngine& operator=(const QeEngine&) = delete;

  /// φ built from quantifier-free parts, ∧, ∨ and ∃.
  Formula to_standard(const Formula& phi);
  /// A standard formula equivalent to ¬φ.
  Formula negate_standard(const Formula& phi);
  /// Sentences come out variable-free; open formulas come out standard,
  /// with a special ∃ only where no quantifier-free equivalent was found.
  Formula eliminate(const Formula& phi);
  /// Throws UnboundVariable when φ has free variables.
  bool decide(const Formula& sentence);

  const QeStats& stats() const;
  const PartialAlgebra& algebra() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Formula to_standard(const PartialAlgebra& b, const Formula& phi, QeOptions opts = {});
Formula negate_standard(const PartialAlgebra& b, const Formula& phi, QeOptions opts = {});
Formula eliminate(const PartialAlgebra& b, const Formula& phi, QeOptions opts = {});

bool decide_sentence(const PartialAlgebra& b, const Formula& sentence, QeOptions opts = {});
/// Builds B from the problem, parses the sentence and decides it.
bool decide_sentence(const Problem& p, std::string_view sentence, QeOptions opts = {});

/// Checks the special-formula shape of every ∃ in φ: free equations x = t
/// with x occurring once and not in t, disequations z ≠ t with z not in t,
/// testers on bound variables only. `why` receives the first violation.
bool is_standard(const Formula& phi, std::string* why = nullptr);

}  // namespace afa
