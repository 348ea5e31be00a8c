#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afa/congruence.hpp"
#include "afa/counting.hpp"
#include "afa/error.hpp"
#include "afa/formula.hpp"
#include "afa/free_extension.hpp"
#include "afa/oracle.hpp"
#include "afa/qe.hpp"

namespace py = pybind11;
using namespace afa;

namespace {

struct PyPresentation {
  explicit PyPresentation(const std::string& text) : pres(parse_problem(text)), algebra(pres) {}

  Term term(const std::string& s) const { return parse_term(s, pres.signature()); }

  Presentation pres;
  PartialAlgebra algebra;
};

py::object cardinality(const PyPresentation& p, const std::string& t) {
  Cardinality c = class_size(p.pres, p.term(t));
  if (c.infinite) return py::float_(std::numeric_limits<double>::infinity());
  return py::int_(py::str(c.value.str()));
}

}  // namespace

PYBIND11_MODULE(_afa, m) {
  m.doc() = "Decision procedures for almost free algebras";

  static py::exception<Error> error(m, "Error");
  static py::exception<Error> budget(m, "BudgetExhausted", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BudgetExhausted) budget(e.what());
      else error(e.what());
    }
  });

  py::class_<PyPresentation>(m, "Presentation")
      .def(py::init<const std::string&>(), py::arg("text"))
      .def("equal", [](const PyPresentation& p, const std::string& s, const std::string& t) {
        return p.pres.equal(p.term(s), p.term(t));
      })
      .def("rep", [](const PyPresentation& p, const std::string& t) {
        return to_string(p.pres.canonical_rep(p.term(t)), p.pres.signature());
      })
      .def("card", &cardinality, "Class size; math.inf for an infinite class")
      .def("intrinsic_infinite", [](const PyPresentation& p) { return intrinsic_infinite(p.pres); })
      .def("is_finite", [](const PyPresentation& p) { return is_finite(p.pres); })
      .def("carrier", [](const PyPresentation& p) {
        std::vector<std::string> out;
        for (const Term& t : enumerate_if_finite(p.pres).elements) out.push_back(to_string(t, p.pres.signature()));
        return out;
      })
      .def("isomorphic", [](const PyPresentation& p, const PyPresentation& q) {
        return are_isomorphic(p.pres.problem(), q.pres.problem());
      })
      .def("partial_algebra", [](const PyPresentation& p) { return p.algebra.to_string(); })
      .def("carrier_size", [](const PyPresentation& p) { return p.algebra.size(); })
      .def(
          "eliminate",
          [](const PyPresentation& p, const std::string& formula, std::size_t budget) {
            return to_string(eliminate(p.algebra, parse_formula(formula, p.algebra), QeOptions{budget}), p.algebra);
          },
          py::arg("formula"), py::arg("budget") = QeOptions{}.budget)
      .def(
          "decide",
          [](const PyPresentation& p, const std::string& sentence, std::size_t budget) {
            return decide_sentence(p.algebra, parse_formula(sentence, p.algebra, ParseOptions{false}), QeOptions{budget});
          },
          py::arg("sentence"), py::arg("budget") = QeOptions{}.budget)
      .def(
          "oracle_equal",
          [](const PyPresentation& p, const std::string& s, const std::string& t, std::size_t steps, int height) {
            return std::string(to_string(rewrite_oracle(p.pres.equations(), p.term(s), p.term(t), {steps, height})));
          },
          py::arg("s"), py::arg("t"), py::arg("steps") = 10000, py::arg("height") = 8)
      .def("__str__", [](const PyPresentation& p) { return to_string(p.pres.problem()); });
}
