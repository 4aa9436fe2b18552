#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "syncpat/congruence.hpp"
#include "syncpat/oracle.hpp"
#include "syncpat/parser.hpp"
#include "syncpat/reachability.hpp"

namespace py = pybind11;
using namespace syncpat;

namespace {

Calculus calculus_from_id(const std::string& id) {
  for (Calculus c : {Calculus::MA, Calculus::SA, Calculus::PiMix, Calculus::PiSep,
                     Calculus::PiAsyn, Calculus::Join})
    if (id == calculus_id(c)) return c;
  throw std::invalid_argument("unknown calculus '" + id + "'");
}

py::dict consumed_dict(const Consumed& c) {
  py::dict d;
  d["label"] = c.label.str();
  d["kind"] = cap_kind_id(c.kind);
  d["recurrent"] = c.recurrent;
  return d;
}

}  // namespace

PYBIND11_MODULE(_syncpat, m) {
  m.doc() = "reduction steps, conflict analysis and synchronisation patterns "
            "for five process calculi";

  py::class_<Term>(m, "Term")
      .def_property_readonly("calculus", [](const Term& t) { return calculus_id(t.cal); })
      .def("__str__", [](const Term& t) { return render(t); })
      .def("__repr__", [](const Term& t) {
        return "Term(" + std::string(calculus_id(t.cal)) + ", '" + render(t) + "')";
      })
      .def("canonical", [](const Term& t) { return canonicalize(t); })
      .def("__eq__", [](const Term& a, const Term& b) { return congruent(a, b); });

  py::class_<Step>(m, "Step")
      .def_readonly("id", &Step::id)
      .def_property_readonly("axiom", [](const Step& s) { return axiom_id(s.axiom); })
      .def_property_readonly("consumed", [](const Step& s) {
        py::list out;
        for (const Consumed& c : s.consumed) out.append(consumed_dict(c));
        return out;
      })
      .def_readonly("residual", &Step::residual)
      .def("__repr__", [](const Step& s) {
        return "Step(" + std::to_string(s.id) + ", " + axiom_id(s.axiom) + ")";
      });

  py::class_<MWitness>(m, "MWitness")
      .def_readonly("a", &MWitness::a)
      .def_readonly("b", &MWitness::b)
      .def_readonly("c", &MWitness::c)
      .def_readonly("non_local", &MWitness::non_local)
      .def_readonly("conflict_ba_symmetric", &MWitness::conflict_ba_symmetric)
      .def_readonly("conflict_bc_symmetric", &MWitness::conflict_bc_symmetric)
      .def_readonly("b_uses_open", &MWitness::b_uses_open);

  py::class_<GreatMWitness>(m, "GreatMWitness")
      .def_property_readonly("cycle", [](const GreatMWitness& w) {
        return std::vector<Step>(w.cycle.begin(), w.cycle.end());
      })
      .def_property_readonly("edge_symmetric", [](const GreatMWitness& w) {
        return std::vector<bool>(w.edge_symmetric.begin(), w.edge_symmetric.end());
      })
      .def_readonly("non_local", &GreatMWitness::non_local);

  py::class_<LemmaReport>(m, "LemmaReport")
      .def_readonly("terms_checked", &LemmaReport::terms_checked)
      .def_readonly("witnesses_found", &LemmaReport::witnesses_found)
      .def_readonly("seconds", &LemmaReport::seconds)
      .def_readonly("note", &LemmaReport::note)
      .def_property_readonly("violations", [](const LemmaReport& r) {
        py::list out;
        for (const Violation& v : r.violations) out.append(py::make_tuple(v.term, v.detail));
        return out;
      });

  m.def("parse", [](const std::string& text, const std::string& calculus) {
    return parse(text, calculus_from_id(calculus));
  }, py::arg("text"), py::arg("calculus"));
  m.def("parse_file", [](const std::string& text) { return parse_file(text); }, py::arg("text"),
        "parse a document with a '%calculus <id>' header");

  m.def("steps", [](const Term& t, int unfold) { return enumerate_steps(t, unfold).steps; },
        py::arg("term"), py::arg("unfold") = 2);
  m.def("apply_step", &apply_step, py::arg("term"), py::arg("step"));

  m.def("classify_pair", [](const Term& t, const Step& a, const Step& b) {
    PairRelation rel = classify_pair(t, a, b);
    py::dict d;
    d["kind"] = pair_kind_id(rel.kind);
    d["disabler"] = rel.disabler;
    py::list shared;
    for (const SharedLabel& sl : rel.shared) {
      py::dict s;
      s["label"] = sl.label.str();
      s["kind"] = cap_kind_id(sl.kind);
      s["rec_in_first"] = sl.rec_in_first;
      s["rec_in_second"] = sl.rec_in_second;
      shared.append(s);
    }
    d["shared"] = shared;
    return d;
  }, py::arg("term"), py::arg("first"), py::arg("second"));

  m.def("decompose", [](const Term& t, int unfold) { return decompose(t, unfold).components; },
        py::arg("term"), py::arg("unfold") = 0);
  m.def("degree_of_distributability", [](const Term& t) -> py::object {
    Degree d = degree_of_distributability(t);
    if (d.unbounded) return py::str("unbounded");
    return py::int_(d.value);
  }, py::arg("term"));

  m.def("find_m", &find_m, py::arg("term"), py::arg("allow_asymmetric") = false,
        py::arg("nonlocal_only") = false);
  m.def("find_great_m", &find_great_m, py::arg("term"), py::arg("allow_asymmetric") = false,
        py::arg("nonlocal_only") = false);

  m.def("reach_success", [](const Term& t) { return verdict_id(reach_success(t)); },
        py::arg("term"));
  m.def("must_reach_success",
        [](const Term& t) { return verdict_id(must_reach_success_finite(t)); }, py::arg("term"));

  m.def("enumerate_terms", [](int max_operators, int name_pool, bool allow_replication) {
    EnumSpec spec;
    spec.max_operators = max_operators;
    spec.name_pool = name_pool;
    spec.allow_replication = allow_replication;
    std::vector<std::string> out;
    enumerate_terms(spec, [&](const Term& t) { out.push_back(render(t)); });
    return out;
  }, py::arg("max_operators"), py::arg("name_pool") = 3, py::arg("allow_replication") = false,
     "every canonical ambient term within the bounds, as text");

  m.def("check_lemma3", [](int max_operators, int name_pool, int jobs) {
    EnumSpec spec;
    spec.max_operators = max_operators;
    spec.name_pool = name_pool;
    return check_lemma3(spec, jobs);
  }, py::arg("max_operators"), py::arg("name_pool") = 3, py::arg("jobs") = 1,
     py::call_guard<py::gil_scoped_release>());
  m.def("check_corollary_unique_names", [](int max_operators, int name_pool, int jobs) {
    EnumSpec spec;
    spec.max_operators = max_operators;
    spec.name_pool = name_pool;
    return check_corollary_unique_names(spec, jobs);
  }, py::arg("max_operators"), py::arg("name_pool") = 3, py::arg("jobs") = 1,
     py::call_guard<py::gil_scoped_release>());
}
