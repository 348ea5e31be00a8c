// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <set>
#include <unordered_set>
#include <sstream>

#include "afa/congruence.hpp"
#include "afa/counting.hpp"
#include "afa/error.hpp"
#include "afa/free_extension.hpp"
#include "afa/oracle.hpp"
#include "afa/qe.hpp"
#include "support/cli_run.hpp"
#include "support/formula_gen.hpp"
#include "support/generators.hpp"

using namespace afa;
using test::Rng;
using test::uniform;

namespace {

const char* kGex = "fun f 2; const a b c; eq a = f(b,c); eq c = f(a,b)";

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  int failures = 0;
  void fail(const std::string& why) {
    if (failures++ < 3) note << (failures > 1 ? "; " : "") << why;
    pass = false;
  }
};

Term T(const Problem& p, const char* s) { return parse_term(s, p.signature); }

Problem random_problem(Rng& rng, int max_equations, int side_height, test::SignatureShape shape = {}) {
  Signature s = test::random_signature(rng, true, shape);
  return Problem{s, test::random_equations(rng, s, max_equations, side_height)};
}

/// A query term: either a random term or a short Γ-rewrite walk from one.
std::pair<Term, Term> query_pair(Rng& rng, const Problem& p, int height) {
  Term s = test::seed_with_side(rng, p.signature, p.equations, height);
  if (uniform(rng, 0, 1) == 0) return {s, test::random_term(rng, p.signature, height)};
  Term t = s;
  for (int k = uniform(rng, 1, 5); k > 0; --k) t = test::random_rewrite(rng, p.equations, t).value_or(t);
  return {s, t};
}

// ------------------------------------------------------------------ C1

void c1(Outcome& o) {
  Problem p = parse_problem(kGex);
  Presentation pr(p);
  const TypeAssignment& ty = pr.types();
  std::set<std::set<std::string>> parts;
  for (const auto& comp : ty.components) {
    std::set<std::string> names;
    for (const Term& t : comp) names.insert(to_string(t, p.signature));
    parts.insert(names);
  }
  if (ty.count() != 2) o.fail("type count " + std::to_string(ty.count()));
  if (parts != std::set<std::set<std::string>>{{"a", "f(b,c)"}, {"c", "f(a,b)"}}) o.fail("wrong type partition");
  if (pr.type_of(T(p, "b"))) o.fail("b is typed");
  if (!class_size(pr, T(p, "a")).infinite || !class_size(pr, T(p, "c")).infinite) o.fail("finite class of a or c");
  if (!decide_equal(p, T(p, "a"), T(p, "f(b,f(a,b))"))) o.fail("a != f(b,f(a,b))");
}

// ------------------------------------------------------------------ C2

void c2(Outcome& o) {
  Rng rng(1002);
  int conclusive = 0;
  for (int i = 0; i < 200; ++i) {
    Problem p = random_problem(rng, 6, 3);
    auto [s, t] = query_pair(rng, p, 4);
    OracleVerdict v = rewrite_oracle(p.equations, s, t, RewriteBudget{100000, 8});
    if (v == OracleVerdict::Unknown) continue;
    ++conclusive;
    if (decide_equal(p, s, t) != (v == OracleVerdict::Equal)) {
      o.fail(to_string(p) + " : " + to_string(s, p.signature) + " vs " + to_string(t, p.signature));
    }
  }
  o.note << (o.pass ? "" : "; ") << conclusive << "/200 conclusive";
}

// ------------------------------------------------------------------ C3

void c3(Outcome& o) {
  Rng rng(1003);
  for (int i = 0; i < 500; ++i) {
    Problem p = random_problem(rng, 5, 3);
    Presentation pr(p);
    Term t = test::seed_with_side(rng, p.signature, p.equations, 4);
    Term r = pr.canonical_rep(t);
    if (rewrite_oracle(p.equations, t, r, RewriteBudget{20000, 8}) == OracleVerdict::NotEqual || !pr.equal(t, r)) {
      o.fail("rep not equivalent: " + to_string(t, p.signature));
    }
    if (pr.canonical_rep(r) != r) o.fail("rep not idempotent: " + to_string(t, p.signature));
  }
  int pairs = 0;
  while (pairs < 200) {
    Problem p = random_problem(rng, 5, 3);
    if (p.equations.empty()) continue;
    Presentation pr(p);
    Term s = test::seed_with_side(rng, p.signature, p.equations, 4);
    Term t = s;
    int steps = 0;
    for (int k = uniform(rng, 1, 5); k > 0; --k) {
      if (auto next = test::random_rewrite(rng, p.equations, t)) {
        t = *next;
        ++steps;
      }
    }
    if (steps == 0) continue;
    ++pairs;
    if (pr.canonical_rep(s) != pr.canonical_rep(t)) {
      o.fail("rewrite pair with distinct reps: " + to_string(s, p.signature) + " / " + to_string(t, p.signature));
    }
  }
}

// ------------------------------------------------------------------ C4

void c4(Outcome& o) {
  Rng rng(1004);
  int acyclic = 0, cyclic = 0;
  while (acyclic < 100 || cyclic < 50) {
    Problem p = random_problem(rng, 4, 2);
    Presentation pr(p);
    std::set<int> cyc = cyclic_types(pr);
    if (cyc.empty() && acyclic < 100) {
      ++acyclic;
      Term t = test::seed_with_side(rng, p.signature, p.equations, 3);
      Cardinality n = class_size(pr, t);
      ClassClosure cc = class_closure(p.equations, t, RewriteBudget{100000, 16});
      if (!cc.saturated) o.fail("oracle unsaturated on acyclic " + to_string(p));
      else if (n.infinite || n.value != cc.members.size()) {
        o.fail("class_size " + n.to_string() + " vs " + std::to_string(cc.members.size()) + " for " +
               to_string(t, p.signature) + " in " + to_string(p));
      }
    } else if (!cyc.empty() && cyclic < 50) {
      ++cyclic;
      Term t = pr.types().representatives[*cyc.begin() - 1];
      if (uniform(rng, 0, 1) == 0) {
        Term ctx = test::random_term(rng, p.signature, 2);
        t = test::replace_at(ctx, test::pick(rng, positions(ctx)), t);
      }
      if (!class_size(pr, t).infinite) o.fail("finite class of cyclic " + to_string(t, p.signature));
      std::size_t m = class_closure(p.equations, t, RewriteBudget{2000, 80}).members.size();
      if (m < 20) o.fail(std::to_string(m) + " members for cyclic " + to_string(t, p.signature));
    }
  }
}

// ------------------------------------------------------------------ C5

/// Classes of terms of height <= h, h = 0, 1, ...: each level applies every
/// symbol to representatives of the previous level. Classes are told apart
/// by canonical representative. Returns the class count
/// once a level adds nothing, or nothing if `max_h` is reached first.
std::optional<std::size_t> stabilized_count(const Presentation& pr, int max_h, std::size_t cap) {
  const Signature& sig = pr.signature();
  std::vector<Term> reps;
  std::unordered_set<Term> seen;
  auto add = [&](const Term& t) {
    if (!seen.insert(pr.canonical_rep(t)).second) return false;
    reps.push_back(t);
    return true;
  };
  for (SymbolId c : sig.constants()) add(Term::constant(c));
  for (int h = 1; h <= max_h; ++h) {
    std::vector<Term> prev = reps;
    bool grew = false;
    for (SymbolId f : sig.functions()) {
      int k = sig.arity(f);
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      while (true) {
        std::vector<Term> kids;
        for (std::size_t i : idx) kids.push_back(prev[i]);
        grew = add(Term(f, std::move(kids))) || grew;
        if (reps.size() > cap) return std::nullopt;
        int d = k - 1;
        while (d >= 0 && ++idx[d] == prev.size()) idx[d--] = 0;
        if (d < 0) break;
      }
    }
    if (!grew) return reps.size();
  }
  return std::nullopt;
}

void c5(Outcome& o) {
  Rng rng(1005);
  auto check = [&](const Problem& p) {
    Presentation pr(p);
    bool fin = is_finite(pr);
    std::optional<std::size_t> n = stabilized_count(pr, 4, 2000);
    if (fin != n.has_value()) {
      o.fail(to_string(p) + (fin ? " finite but unstable to height 4" : " infinite but stable"));
      return;
    }
    if (fin && enumerate_if_finite(pr).elements.size() != *n) o.fail("carrier size differs for " + to_string(p));
  };
  Problem loop = parse_problem("fun f 1; const a; eq f(a) = a");
  check(loop);
  if (enumerate_if_finite(Presentation(loop)).elements.size() != 1) o.fail("{fa=a} carrier size");
  if (is_finite(Presentation(parse_problem("fun f 1; const a")))) o.fail("empty Γ finite");
  if (is_finite(Presentation(parse_problem(kGex)))) o.fail("Γ_ex finite");
  check(parse_problem(kGex));
  int finite = 0;
  for (int i = 0; i < 100; ++i) {
    Signature s = test::random_signature(rng, true, {1, 2, 2, 1, 2});
    Problem p{s, test::random_equations(rng, s, 5, 2, 1)};
    finite += is_finite(Presentation(p));
    check(p);
  }
  o.note << (o.pass ? "" : "; ") << finite << "/100 random finite";
}

// ------------------------------------------------------------------ C6

void c6(Outcome& o) {
  Rng rng(1006);
  for (int i = 0; i < 60; ++i) {
    Signature s = test::random_signature(rng, true);
    Problem p1{s, test::random_equations(rng, s, 4, 2)};
    Problem p2{s, test::random_equations(rng, s, 4, 2)};
    if (!are_isomorphic(p1, p1)) o.fail("not reflexive: " + to_string(p1));
    if (are_isomorphic(p1, p2) != are_isomorphic(p2, p1)) o.fail("not symmetric: " + to_string(p1) + " / " + to_string(p2));
    Problem flipped{s, {}};
    for (const Equation& e : p1.equations) flipped.equations.add(e.rhs, e.lhs);
    if (!are_isomorphic(p1, flipped)) o.fail("flipped equations differ: " + to_string(p1));
  }
  const char* sig = "fun f 2; const a b c; ";
  if (!are_isomorphic(parse_problem(std::string(sig) + "eq a = b"), parse_problem(std::string(sig) + "eq b = a"))) {
    o.fail("{a=b} vs {b=a}");
  }
  if (are_isomorphic(parse_problem(std::string(sig) + "eq a = b"), parse_problem(std::string(sig) + "eq a = c"))) {
    o.fail("{a=b} vs {a=c}");
  }
}

// ------------------------------------------------------------------ C7

void c7(Outcome& o) {
  Rng rng(1007);
  int equal = 0;
  for (int i = 0; i < 30; ++i) {
    Problem p = random_problem(rng, 5, 2, {1, 2, 2, 2, 2});
    PartialAlgebra b{Presentation(p)};
    for (int j = 0; j < 500; ++j) {
      auto [s, t] = query_pair(rng, p, 4);
      bool same = normalize(b, s) == normalize(b, t);
      bool eq = decide_equal(p, s, t);
      equal += eq;
      if (same != eq) o.fail(to_string(s, p.signature) + " / " + to_string(t, p.signature) + " in " + to_string(p));
    }
  }
  o.note << (o.pass ? "" : "; ") << equal << "/15000 equal pairs";
}

// ------------------------------------------------------------------ C8

/// Exhaustive evaluation over the total algebra F_Γ. Every element lies in B,
/// so every tester is false.
struct FiniteModel {
  const PartialAlgebra& b;
  const FiniteAlgebra& fa;
  std::vector<int> of_element;

  int eval(const OpenTerm& t, const std::map<std::string, int>& v) const {
    switch (t.kind()) {
      case OpenTerm::Kind::Var: return v.at(t.name());
      case OpenTerm::Kind::Elem: return of_element[t.element()];
      case OpenTerm::Kind::App: {
        std::vector<int> args;
        for (const OpenTerm& a : t.args()) args.push_back(eval(a, v));
        return fa.table.at(t.symbol()).at(args);
      }
    }
    return -1;
  }

  bool holds(const Formula& f, std::map<std::string, int>& v) const {
    switch (f.kind()) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Eq: return eval(f.lhs(), v) == eval(f.rhs(), v);
      case FormulaKind::Neq: return eval(f.lhs(), v) != eval(f.rhs(), v);
      case FormulaKind::Is: return false;
      case FormulaKind::NotIs: return true;
      case FormulaKind::Not: return !holds(f.body(), v);
      case FormulaKind::And:
        for (const Formula& p : f.parts()) {
          if (!holds(p, v)) return false;
        }
        return true;
      case FormulaKind::Or:
        for (const Formula& p : f.parts()) {
          if (holds(p, v)) return true;
        }
        return false;
      case FormulaKind::Exists:
      case FormulaKind::Forall: return quantify(f, 0, v);
    }
    return false;
  }

  bool quantify(const Formula& f, std::size_t i, std::map<std::string, int>& v) const {
    bool ex = f.kind() == FormulaKind::Exists;
    if (i == f.bound().size()) return holds(f.body(), v);
    const std::string& y = f.bound()[i];
    auto saved = v.find(y) == v.end() ? std::nullopt : std::optional<int>(v[y]);
    bool result = !ex;
    for (int e = 0; e < static_cast<int>(fa.elements.size()); ++e) {
      v[y] = e;
      if (quantify(f, i + 1, v) == ex) {
        result = ex;
        break;
      }
    }
    if (saved) v[y] = *saved;
    else v.erase(y);
    return result;
  }
};

void c8(Outcome& o) {
  Rng rng(1008);
  std::vector<Problem> suite{parse_problem("fun f 1; const a; eq f(a) = a"),
                             parse_problem("fun f 1; fun g 1; const a b; eq f(a) = b; eq f(b) = a; eq g(a) = a; eq g(b) = a"),
                             parse_problem("fun f 2; const a b; eq f(a,a) = b; eq f(a,b) = a; eq f(b,a) = a; eq f(b,b) = b")};
  while (suite.size() < 10) {
    Signature s = test::random_signature(rng, true, {1, 2, 2, 1, 3});
    Problem p{s, test::random_equations(rng, s, 6, 2, 2)};
    if (is_finite(Presentation(p))) suite.push_back(p);
  }
  int sentences = 0, true_count = 0;
  for (const Problem& p : suite) {
    Presentation pr(p);
    PartialAlgebra b(pr);
    FiniteAlgebra fa = enumerate_if_finite(pr);
    FiniteModel m{b, fa, {}};
    for (ElementId e = 0; e < b.size(); ++e) m.of_element.push_back(fa.evaluate(b.name(e)));
    for (int i = 0; i < 50; ++i) {
      Formula phi = test::random_formula(rng, b, {}, {"y", "z"}, test::FormulaShape{2, 2, 2, false, true});
      std::map<std::string, int> v;
      bool want = m.holds(phi, v);
      bool got = decide_sentence(b, phi);
      ++sentences;
      true_count += want;
      if (got != want) o.fail(to_string(phi, b) + " in " + to_string(p));
    }
  }
  o.note << (o.pass ? "" : "; ") << sentences << " sentences over " << suite.size() << " presentations, "
         << true_count << " true";
}

// ------------------------------------------------------------------ C9

void c9(Outcome& o) {
  Rng rng(1009);
  int true_count = 0;
  for (const char* text : {"fun f 1; fun g 1; const a b", kGex}) {
    Problem p = parse_problem(text);
    PartialAlgebra b{Presentation(p)};
    bool binary = text == kGex;
    for (int i = 0; i < 25; ++i) {
      int nvars = uniform(rng, 1, 2);
      std::vector<std::string> ys = nvars == 1 ? std::vector<std::string>{"y"} : std::vector<std::string>{"y", "z"};
      Formula matrix = test::random_formula(rng, b, ys, {}, test::FormulaShape{0, 2, 2, false, true});
      Formula phi = Formula::exists(ys, matrix);
      if (!phi.free().empty()) continue;
      // Witness heights: 4 on the unary signature; on the binary one the
      // search space grows too fast, so 2 for one variable and 1 for two.
      int h = binary ? (nvars == 1 ? 2 : 1) : 4;
      std::vector<FBTerm> terms = enumerate_fb_terms(b, h, 200000);
      bool witness = false;
      std::vector<std::string> names = matrix.free();
      std::vector<std::size_t> idx(names.size(), 0);
      while (!witness) {
        Valuation v;
        for (std::size_t k = 0; k < names.size(); ++k) v[names[k]] = terms[idx[k]];
        witness = evaluate_qf(b, matrix, v);
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == terms.size()) idx[d++] = 0;
        if (d == idx.size()) break;
      }
      bool got = decide_sentence(b, phi);
      true_count += got;
      if (got != witness) {
        o.fail(std::string(got ? "no witness for " : "witness against ") + to_string(phi, b) + " in " + text);
      }
    }
  }
  o.note << (o.pass ? "" : "; ") << true_count << "/50 true";
}

// ------------------------------------------------------------------ C10

void c10(Outcome& o) {
  Rng rng(1010);
  int open = 0, closed = 0;
  for (const char* text : {"fun f 1; fun g 1; const a b", "fun f 1; const a b; eq f(a) = b", kGex,
                           "fun f 1; const a; eq f(f(a)) = a"}) {
    PartialAlgebra b{Presentation(parse_problem(text))};
    bool binary = text == kGex;
    test::FormulaShape shape{binary ? 1 : 2, binary ? 1 : 2, 2, false, true};
    for (int i = 0; i < 60; ++i) {
      Formula sentence = test::random_formula(rng, b, {}, {"y", "z"}, shape);
      Formula e = eliminate(b, sentence);
      ++closed;
      if (!is_quantifier_free(e)) o.fail("quantifier left in " + to_string(e, b));
      if (!e.free().empty()) o.fail("free variables in " + to_string(e, b));

      Formula phi = test::random_formula(rng, b, {"x1", "x2"}, {"y", "z"}, shape);
      std::string why;
      ++open;
      if (!is_standard(to_standard(b, phi), &why)) o.fail("to_standard: " + why + " for " + to_string(phi, b));
      if (!is_standard(eliminate(b, phi), &why)) o.fail("eliminate: " + why + " for " + to_string(phi, b));
    }
  }
  o.note << (o.pass ? "" : "; ") << closed << " sentences quantifier-free, " << open << " open formulas standard";
}

// ------------------------------------------------------------------ C11

void c11(Outcome& o) {
  std::string path = test::temp_problem("accept_c11", std::string(kGex) + "\n");
  std::string deep =
      "forall x1. exists y1. forall x2. exists y2. forall x3. exists y3. forall x4. exists y4. "
      "(x1 = f(y1,x2) | y2 != f(x3,y3) | x4 = f(y4,y1)) & (y4 != f(x1,x3) | is_f(y2) | x2 = f(y3,y4))";
  auto r = test::run_cli({"decide", "--json", "--budget", "1000", "--problem", path, deep});
  if (r.code != 2) o.fail("exit code " + std::to_string(r.code));
  try {
    auto j = nlohmann::json::parse(r.out);
    if (!j.contains("error") || j["error"]["kind"] != "budget-exhausted" || j.contains("answer")) {
      o.fail("unexpected JSON " + r.out);
    }
  } catch (const std::exception& e) {
    o.fail(std::string("unparsable output: ") + e.what());
  }
  // Across budgets every run either exhausts or returns the same verdict.
  std::string sentence =
      "forall x1. exists y1. forall x2. exists y2. forall x3. exists y3. "
      "(f(x1,y1) != f(y2,x2) | x3 = f(y1,y3)) & (y3 != f(x1,x2) | is_f(y2)) & (y1 = f(x2,x3) | y2 != f(y3,x1))";
  std::set<std::string> answers;
  int exhausted = 0;
  for (std::size_t budget : {10, 100, 1000, 10000, 100000, 1000000}) {
    auto run = test::run_cli({"decide", "--budget", std::to_string(budget), "--problem", path, sentence});
    if (run.code == 2) ++exhausted;
    else if (run.code == 0) answers.insert(run.out);
    else o.fail("exit code " + std::to_string(run.code) + " at budget " + std::to_string(budget));
  }
  if (answers.size() != 1) o.fail(std::to_string(answers.size()) + " distinct verdicts across budgets");
  o.note << (o.pass ? "" : "; ") << "exit 2 with budget-exhausted error; " << exhausted
         << "/6 budgets exhausted, one verdict otherwise";
}

// ------------------------------------------------------------------ C12

Term sized_term(Rng& rng, const Signature& sig, int size) {
  std::vector<SymbolId> cs(sig.constants().begin(), sig.constants().end());
  std::vector<SymbolId> fs(sig.functions().begin(), sig.functions().end());
  if (size <= 1) return Term::constant(test::pick(rng, cs));
  SymbolId f = test::pick(rng, fs);
  int k = sig.arity(f);
  int rest = size - 1;
  std::vector<Term> kids;
  for (int i = 0; i < k; ++i) {
    int share = i == k - 1 ? rest : uniform(rng, 1, std::max(1, rest - (k - 1 - i)));
    rest -= share;
    kids.push_back(sized_term(rng, sig, std::max(1, share)));
  }
  return Term(f, std::move(kids));
}

void c12(Outcome& o) {
  Rng rng(1012);
  Problem p = parse_problem("fun f 2; fun g 1; fun h 2; const a b c");
  for (int i = 0; i < 20; ++i) {
    p.equations.add(sized_term(rng, p.signature, uniform(rng, 100, 200)), sized_term(rng, p.signature, uniform(rng, 100, 200)));
  }
  std::vector<std::pair<Term, Term>> queries;
  for (int i = 0; i < 20; ++i) {
    const Equation& e = p.equations.equations()[static_cast<std::size_t>(i)];
    queries.emplace_back(Term(p.signature.functions()[0], {e.lhs, e.lhs}), Term(p.signature.functions()[0], {e.rhs, e.lhs}));
    queries.emplace_back(sized_term(rng, p.signature, 200), sized_term(rng, p.signature, 200));
  }
  auto start = std::chrono::steady_clock::now();
  int equal = 0;
  for (const auto& [s, t] : queries) equal += decide_equal(p, s, t);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (equal < 20) o.fail("congruent queries not recognized");
  if (ms >= 1000) o.fail("took " + std::to_string(ms) + " ms");
  o.note << (o.pass ? "" : "; ") << queries.size() << " queries in " << static_cast<int>(ms) << " ms";
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by id, e.g. `acceptance C8 C9`.
  std::set<std::string> only(argv + 1, argv + argc);
  std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"C1 example presentation", c1},      {"C2 word problem vs oracle", c2},  {"C3 canonical representatives", c3},
      {"C4 cardinality vs oracle", c4},     {"C5 finiteness", c5},              {"C6 isomorphism", c6},
      {"C7 free extension", c7},            {"C8 QE on finite algebras", c8},   {"C9 QE witnesses", c9},
      {"C10 QE output shape", c10},         {"C11 budget exhaustion", c11},     {"C12 polynomial smoke", c12}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    std::string id(name, std::string_view(name).find(' '));
    if (!only.empty() && !only.contains(id)) continue;
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << std::fixed << std::setprecision(2) << s << " s)";
    std::string note = o.note.str();
    if (!note.empty()) std::cout << ": " << note;
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
