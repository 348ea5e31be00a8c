#include <doctest.h>

#include "afa/counting.hpp"
#include "afa/error.hpp"
#include "afa/oracle.hpp"
#include "support/generators.hpp"

using namespace afa;

namespace {

Presentation P(const char* text) { return Presentation(parse_problem(text)); }

const char* kGex = "fun f 2; const a b c; eq a = fbc; eq c = fab";

Term T(const Presentation& p, const char* s) { return parse_term(s, p.signature()); }

}  // namespace

TEST_CASE("typed_graph") {
  Presentation p = P(kGex);
  TypedMixedGraph g = typed_graph(p);
  CHECK(g.types == std::vector<int>{1, 1, 0, 2, 2, 2, 1, 0});
  CHECK(typed_graph(P("const a")).graph.nodes.empty());

  TypedMixedGraph ab = typed_graph(P("const a b; eq a = b"));
  CHECK(ab.types == std::vector<int>{1, 1});
  CHECK(ab.undirected == EdgeSet{{0, 1}});

  QuotientGraph q = quotient_graph(g);
  CHECK(q.class_count() == 3);
}

TEST_CASE("cyclic_types") {
  CHECK(cyclic_types(P(kGex)) == std::set<int>{1, 2});
  CHECK(cyclic_types(P("fun f 2; const a b c; eq a = b")).empty());
  CHECK(cyclic_types(P("fun f 2; const a b c")).empty());
}

TEST_CASE("class_size") {
  Presentation gex = P(kGex);
  CHECK(class_size(gex, T(gex, "a")).to_string() == "inf");
  CHECK(class_size(gex, T(gex, "c")).infinite);
  CHECK(class_size(gex, T(gex, "b")).to_string() == "1");
  CHECK(class_size(gex, T(gex, "f(b,b)")).to_string() == "1");

  Presentation empty = P("fun f 2; const a b c");
  CHECK(class_size(empty, T(empty, "f(a,f(b,c))")).to_string() == "1");

  Presentation ab = P("fun f 2; const a b c; eq a = b");
  CHECK(class_size(ab, T(ab, "f(a,c)")).to_string() == "2");
  // Typed leaves multiply: {a,b} at three positions.
  CHECK(class_size(ab, T(ab, "f(a,f(a,a))")).to_string() == "8");

  Presentation nest = P("fun g 1; const a b c; eq c = g(a); eq a = b");
  CHECK(class_size(nest, T(nest, "c")).to_string() == "3");
}

TEST_CASE("intrinsic_infinite") {
  CHECK_FALSE(intrinsic_infinite(P(kGex)));
  CHECK_FALSE(intrinsic_infinite(P("fun f 2; const a b c")));
  CHECK(intrinsic_infinite(P("fun f 1; const a; eq a = fa")));
}

TEST_CASE("subterm_closure") {
  Presentation gex = P(kGex);
  std::vector<std::string> st;
  for (const Term& t : subterm_closure(gex.equations(), gex.signature())) st.push_back(to_string(t, gex.signature()));
  CHECK(st == std::vector<std::string>{"a", "b", "c", "f(a,b)", "f(b,c)"});
  CHECK(subterm_closure(EquationSet{}, gex.signature()).empty());
  Presentation fa = P("fun f 1; const a; eq fa = a");
  CHECK(subterm_closure(fa.equations(), fa.signature()).size() == 2);
}

TEST_CASE("is_finite and enumerate_if_finite") {
  Presentation fa = P("fun f 1; const a; eq fa = a");
  CHECK(is_finite(fa));
  FiniteAlgebra alg = enumerate_if_finite(fa);
  REQUIRE(alg.elements.size() == 1);
  CHECK(alg.table.at(*fa.signature().find("f")).at({0}) == 0);

  CHECK_FALSE(is_finite(P("fun f 1; const a")));
  CHECK_FALSE(is_finite(P(kGex)));
  try {
    enumerate_if_finite(P(kGex));
    FAIL("expected not-finite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFinite);
  }

  Presentation fab = P("fun f 1; const a b; eq fa = a; eq a = b");
  CHECK(enumerate_if_finite(fab).elements.size() == 1);

  Presentation consts = P("const a b c");
  CHECK(is_finite(consts));
  FiniteAlgebra c3 = enumerate_if_finite(consts);
  CHECK(c3.elements.size() == 3);
  CHECK(c3.table.empty());
}

TEST_CASE("are_isomorphic") {
  Problem gex = parse_problem(kGex);
  CHECK(are_isomorphic(gex, gex));
  CHECK(are_isomorphic(parse_problem("fun f 2; const a b c; eq a = b"), parse_problem("fun f 2; const a b c; eq b = a")));
  CHECK_FALSE(
      are_isomorphic(parse_problem("fun f 2; const a b c; eq a = b"), parse_problem("fun f 2; const a b c; eq a = c")));
  try {
    are_isomorphic(gex, parse_problem("fun g 2; const a b c"));
    FAIL("expected signature mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SignatureMismatch);
  }
}

TEST_CASE("property: class_size is a class invariant and matches a saturated oracle") {
  test::Rng rng(31);
  int saturated = 0;
  for (int i = 0; i < 120; ++i) {
    Signature s = test::random_signature(rng, true);
    Presentation p(Problem{s, test::random_equations(rng, s, 3, 2, 1)});
    Term t = test::seed_with_side(rng, s, p.equations(), 2);
    Cardinality n = class_size(p, t);
    if (auto u = test::random_rewrite(rng, p.equations(), t)) CHECK(class_size(p, *u) == n);
    ClassClosure cc = class_closure(p.equations(), t, {3000, 6});
    if (cc.saturated) {
      ++saturated;
      REQUIRE_FALSE(n.infinite);
      CHECK(n.value == cc.members.size());
    }
    if (n.infinite) CHECK(class_closure(p.equations(), t, {2000, 80}).members.size() > 20);
  }
  CHECK(saturated > 20);
}
