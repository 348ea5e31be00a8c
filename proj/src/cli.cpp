#include "afa/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "afa/congruence.hpp"
#include "afa/counting.hpp"
#include "afa/error.hpp"
#include "afa/formula.hpp"
#include "afa/free_extension.hpp"
#include "afa/oracle.hpp"
#include "afa/qe.hpp"

namespace afa::cli {

namespace {

using json = nlohmann::ordered_json;

struct Answer {
  std::string text;
  json value;
  json detail = json::object();
  std::vector<std::string> extra_lines{};
};

json stats_json(const QeStats& s) {
  return {{"steps", s.steps},
          {"memo_hits", s.memo_hits},
          {"empty_domains", s.empty_domains},
          {"b_domains", s.b_domains},
          {"infinite_domains", s.infinite_domains}};
}

Answer boolean(bool v) { return {v ? "true" : "false", v}; }

json algebra_json(const PartialAlgebra& b) {
  const Signature& sig = b.signature();
  json elements = json::array();
  for (ElementId e = 0; e < b.size(); ++e) elements.push_back(to_string(b.name(e), sig));
  json ops = json::array();
  for (SymbolId f : sig.functions()) {
    for (const auto& [args, value] : b.defined(f)) {
      json a = json::array();
      for (ElementId x : args) a.push_back(x);
      ops.push_back({{"symbol", sig.name(f)}, {"args", a}, {"value", value}});
    }
  }
  json constants = json::object();
  for (SymbolId c : sig.constants()) constants[sig.name(c)] = b.constant(c);
  return {{"height_bound", b.height_bound()}, {"elements", elements}, {"constants", constants},
          {"operations", ops},           {"total", b.total()}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision procedures for almost free algebras", "afa"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string problem_path;
  bool as_json = false;
  std::size_t budget = QeOptions{}.budget;
  app.add_option("--problem", problem_path, "Problem file")->required();
  app.add_flag("--json", as_json, "Structured output");
  app.add_option("--budget", budget, "QE step budget")->check(CLI::PositiveNumber);

  std::string s, t, formula, other;
  bool enumerate = false;
  RewriteBudget rb{100000, 8};

  auto* eq = app.add_subcommand("eq", "Decide s = t");
  eq->add_option("s", s)->required();
  eq->add_option("t", t)->required();
  auto* rep = app.add_subcommand("rep", "Canonical representative");
  rep->add_option("t", t)->required();
  auto* card = app.add_subcommand("card", "Size of the class of t");
  card->add_option("t", t)->required();
  auto* infinite = app.add_subcommand("infinite", "Intrinsic infinity");
  auto* finite = app.add_subcommand("finite", "Finiteness of the quotient");
  finite->add_flag("--enumerate", enumerate, "List the carrier");
  auto* iso = app.add_subcommand("iso", "Isomorphism with a second problem");
  iso->add_option("file2", other)->required();
  auto* build_b = app.add_subcommand("build-b", "Print the partial algebra B");
  auto* qe = app.add_subcommand("qe", "Eliminate quantifiers");
  qe->add_option("formula", formula)->required();
  auto* decide = app.add_subcommand("decide", "Decide a sentence");
  decide->add_option("formula", formula)->required();
  auto* oracle = app.add_subcommand("oracle", "Brute-force rewriting");
  oracle->require_subcommand(1);
  auto* oracle_eq = oracle->add_subcommand("eq", "Search for a rewrite path from s to t");
  oracle_eq->add_option("s", s)->required();
  oracle_eq->add_option("t", t)->required();
  oracle_eq->add_option("--steps", rb.max_steps)->check(CLI::PositiveNumber);
  oracle_eq->add_option("--height", rb.max_height)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  std::string command;
  for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();
  if (oracle->parsed()) command = "oracle eq";

  auto fail = [&](const std::string& kind, const std::string& message, int code) {
    if (as_json) {
      json j{{"command", command}, {"error", {{"kind", kind}, {"message", message}}}};
      out << j.dump(2) << "\n";
    } else {
      err << "error (" << kind << "): " << message << "\n";
    }
    return code;
  };

  Answer answer;
  QeOptions opts{budget};
  try {
    Problem problem = load_problem(problem_path);
    const Signature& sig = problem.signature;
    if (eq->parsed()) {
      answer = boolean(decide_equal(problem, parse_term(s, sig), parse_term(t, sig)));
    } else if (rep->parsed()) {
      Term r = canonical_rep(problem, parse_term(t, sig));
      answer = {to_string(r, sig), to_string(r, sig)};
      answer.detail["reduced"] = to_string(reduced_rep(problem, parse_term(t, sig)), sig);
    } else if (card->parsed()) {
      Cardinality c = class_size(Presentation(problem), parse_term(t, sig));
      answer = {c.to_string(), c.to_string()};
    } else if (infinite->parsed()) {
      answer = boolean(intrinsic_infinite(Presentation(problem)));
    } else if (finite->parsed()) {
      Presentation p(problem);
      answer = boolean(is_finite(p));
      if (enumerate && answer.value.get<bool>()) {
        FiniteAlgebra fa = enumerate_if_finite(p);
        json elems = json::array();
        for (const Term& e : fa.elements) {
          elems.push_back(to_string(e, sig));
          answer.extra_lines.push_back(to_string(e, sig));
        }
        answer.detail["elements"] = elems;
      }
    } else if (iso->parsed()) {
      answer = boolean(are_isomorphic(problem, load_problem(other)));
    } else if (build_b->parsed()) {
      PartialAlgebra b{Presentation(problem)};
      std::string text = b.to_string();
      if (!text.empty() && text.back() == '\n') text.pop_back();
      answer = {text, b.size(), algebra_json(b)};
    } else if (qe->parsed()) {
      PartialAlgebra b{Presentation(problem)};
      QeEngine engine(b, opts);
      Formula r = engine.eliminate(parse_formula(formula, b));
      answer = {to_string(r, b), to_string(r, b)};
      answer.detail["quantifier_free"] = is_quantifier_free(r);
      answer.detail["stats"] = stats_json(engine.stats());
    } else if (decide->parsed()) {
      PartialAlgebra b{Presentation(problem)};
      QeEngine engine(b, opts);
      answer = boolean(engine.decide(parse_formula(formula, b, ParseOptions{false})));
      answer.detail["stats"] = stats_json(engine.stats());
    } else {
      OracleVerdict v = rewrite_oracle(problem.equations, parse_term(s, sig), parse_term(t, sig), rb);
      answer = {afa::to_string(v), afa::to_string(v)};
    }
  } catch (const Error& e) {
    return fail(afa::to_string(e.kind()), e.what(), e.kind() == ErrorKind::BudgetExhausted ? 2 : 1);
  }

  if (as_json) {
    json j{{"command", command}, {"answer", answer.value}, {"detail", answer.detail}};
    out << j.dump(2) << "\n";
  } else {
    out << answer.text << "\n";
    for (const std::string& line : answer.extra_lines) out << line << "\n";
  }
  return 0;
}

}  // namespace afa::cli
