#include <doctest.h>

#include "afa/canonical.hpp"
#include "support/generators.hpp"

using namespace afa;

namespace {

Problem gex() { return parse_problem("fun f 2; const a b c; eq a = fbc; eq c = fab"); }

Term T(const Problem& p, const char* s) { return parse_term(s, p.signature); }

std::vector<std::string> names(const std::vector<Term>& ts, const Signature& s) {
  std::vector<std::string> out;
  for (const Term& t : ts) out.push_back(to_string(t, s));
  return out;
}

}  // namespace

TEST_CASE("compute_types") {
  Problem p = gex();
  TypeAssignment ty = compute_types(p);
  REQUIRE(ty.count() == 2);
  CHECK(names(ty.components[0], p.signature) == std::vector<std::string>{"a", "f(b,c)"});
  CHECK(names(ty.components[1], p.signature) == std::vector<std::string>{"c", "f(a,b)"});

  CHECK(compute_types(parse_problem("const a")).count() == 0);

  Problem abc = parse_problem("const a b c; eq a = b; eq b = c");
  TypeAssignment t3 = compute_types(abc);
  REQUIRE(t3.count() == 1);
  CHECK(names(t3.components[0], abc.signature) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("type_of") {
  Problem p = gex();
  CHECK(type_of(p, T(p, "fab")) == 2);
  CHECK_FALSE(type_of(p, T(p, "b")).has_value());
  CHECK(type_of(p, T(p, "fbfab")) == 1);
}

TEST_CASE("reduced_rep") {
  Problem p = gex();
  SymbolId f = *p.signature.find("f"), b = *p.signature.find("b");
  CHECK(reduced_rep(p, T(p, "fbc")) ==
        ReducedTree{{{}, {false, f}}, {{0}, {false, b}}, {{1}, {true, 2}}});
  CHECK(reduced_rep(p, T(p, "f(f(a,b),b)")) ==
        ReducedTree{{{}, {false, f}}, {{0}, {true, 2}}, {{1}, {false, b}}});
  CHECK(to_string(reduced_rep(p, T(p, "fbc")), p.signature) == "{e->f, 0->b, 1->type-2}");

  Problem empty = parse_problem("fun f 2; const a b c");
  Term t = T(empty, "f(f(a,b),c)");
  ReducedTree r = reduced_rep(empty, t);
  CHECK(r.size() == t.size());
  CHECK(std::none_of(r.begin(), r.end(), [](const auto& kv) { return kv.second.is_type; }));
}

TEST_CASE("canonical_rep") {
  Problem p = gex();
  CHECK(canonical_rep(p, T(p, "f(b,f(a,b))")) == T(p, "a"));
  CHECK(canonical_rep(p, T(p, "f(a,a)")) == T(p, "f(a,a)"));
  CHECK(canonical_rep(p, T(p, "f(fbc,fbc)")) == T(p, "f(a,a)"));
  Problem empty = parse_problem("fun f 2; const a b c");
  CHECK(canonical_rep(empty, T(empty, "f(f(a,b),c)")) == T(empty, "f(f(a,b),c)"));
}

TEST_CASE("property: type-index leaves have no typed strict ancestor below the root") {
  test::Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    Signature s = test::random_signature(rng, true);
    Presentation pr(Problem{s, test::random_equations(rng, s, 4, 2, 1)});
    Term t = test::seed_with_side(rng, s, pr.equations(), 4);
    ReducedTree r = pr.reduced_rep(t);
    CHECK_FALSE(r.at({}).is_type);
    for (const auto& [pos, label] : r) {
      if (!label.is_type) continue;
      CHECK(pr.type_of(subterm_at(t, pos)) == label.value);
      for (std::size_t k = 1; k < pos.size(); ++k) {
        Position anc(pos.begin(), pos.begin() + static_cast<long>(k));
        CHECK_FALSE(pr.type_of(subterm_at(t, anc)).has_value());
        CHECK_FALSE(r.at(anc).is_type);
      }
    }
    // The types computed on the e-graph match pairwise decide_equal on sides.
    const TypeAssignment& ty = pr.types();
    for (int a = 0; a < ty.count(); ++a) {
      for (int b = 0; b < ty.count(); ++b) {
        bool same = decide_equal(pr.problem(), ty.representatives[a], ty.representatives[b]);
        CHECK(same == (a == b));
      }
      for (const Term& m : ty.components[a]) CHECK(decide_equal(pr.problem(), m, ty.representatives[a]));
    }
  }
}
