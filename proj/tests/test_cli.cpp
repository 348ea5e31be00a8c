#include <doctest.h>

#include <json.hpp>

#include "support/cli_run.hpp"

using afa::test::run_cli;
using afa::test::temp_problem;
using nlohmann::json;

namespace {

std::string gex() { return temp_problem("gex", "fun f 2; const a b c;\neq a = f(b,c);\neq c = f(a,b);\n"); }
std::string free1() { return temp_problem("free1", "fun f 1; const a b;\n"); }
std::string loop() { return temp_problem("loop", "fun f 1; const a;\neq f(a) = a;\n"); }

}  // namespace

TEST_CASE("cli examples") {
  auto r = run_cli({"eq", "--problem", gex(), "a", "f(b,f(a,b))"});
  CHECK(r.code == 0);
  CHECK(r.out == "true\n");
  CHECK(run_cli({"card", "--problem", gex(), "a"}).out == "inf\n");
  CHECK(run_cli({"card", "--problem", gex(), "b"}).out == "1\n");
  CHECK(run_cli({"decide", "--problem", free1(), "exists y. f(y) = a"}).out == "false\n");
  CHECK(run_cli({"decide", "--problem", free1(), "forall x. exists y. x = f(y) | x = a | x = b"}).out == "true\n");
  CHECK(run_cli({"rep", "--problem", gex(), "f(b,f(a,b))"}).out == "a\n");
  CHECK(run_cli({"infinite", "--problem", gex()}).out == "false\n");
  CHECK(run_cli({"infinite", "--problem", loop()}).out == "true\n");
  CHECK(run_cli({"finite", "--problem", gex()}).out == "false\n");
  CHECK(run_cli({"finite", "--enumerate", "--problem", loop()}).out == "true\na\n");
  CHECK(run_cli({"iso", "--problem", gex(), gex()}).out == "true\n");
  CHECK(run_cli({"oracle", "eq", "--problem", gex(), "a", "f(b,c)"}).out == "equal\n");
  CHECK(run_cli({"qe", "--problem", loop(), "exists y. x = f(y)"}).out == "true\n");
  auto b = run_cli({"build-b", "--problem", loop()});
  CHECK(b.out.find("carrier (1): [a]") != std::string::npos);
}

TEST_CASE("cli json") {
  auto r = run_cli({"--json", "eq", "--problem", gex(), "a", "f(b,c)"});
  json j = json::parse(r.out);
  CHECK(j["command"] == "eq");
  CHECK(j["answer"] == true);
  CHECK(j.contains("detail"));
  CHECK(run_cli({"--json", "eq", "--problem", gex(), "a", "f(b,c)"}).out == r.out);

  auto bb = json::parse(run_cli({"build-b", "--json", "--problem", gex()}).out);
  CHECK(bb["answer"] == 10);
  CHECK(bb["detail"]["elements"].size() == 10);
  CHECK(bb["detail"]["total"] == false);

  auto d = json::parse(run_cli({"decide", "--json", "--problem", gex(), "exists y. y = f(y,b)"}).out);
  CHECK(d["answer"] == false);
  CHECK(d["detail"]["stats"]["steps"].get<int>() > 0);
}

TEST_CASE("cli errors") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"eq", "--problem", gex(), "a"}).code == 1);
  CHECK(run_cli({"frobnicate", "--problem", gex()}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);

  auto unknown = run_cli({"--json", "eq", "--problem", gex(), "a", "g(b)"});
  CHECK(unknown.code == 1);
  json j = json::parse(unknown.out);
  CHECK(j["error"]["kind"] == "unknown-symbol");

  auto missing = run_cli({"eq", "--problem", "/nonexistent/x.afa", "a", "b"});
  CHECK(missing.code == 1);
  CHECK_FALSE(missing.err.empty());

  CHECK(run_cli({"decide", "--problem", gex(), "x = a"}).code == 1);
  CHECK(run_cli({"iso", "--problem", gex(), free1()}).code == 1);

  auto budget = run_cli({"decide", "--json", "--budget", "10", "--problem", gex(),
                         "forall x. exists y. x = f(y,y) | x = y"});
  CHECK(budget.code == 2);
  CHECK(json::parse(budget.out)["error"]["kind"] == "budget-exhausted");
}
