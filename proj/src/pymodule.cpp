#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coxcount/cones.hpp"
#include "coxcount/count.hpp"
#include "coxcount/surface.hpp"

namespace py = pybind11;
using namespace coxcount;

namespace {

py::object py_int(const Int& v) { return py::module_::import("builtins").attr("int")(v.get_str()); }

py::object py_frac(const Rat& v) {
  return py::module_::import("fractions").attr("Fraction")(v.get_str());
}

std::vector<Int> to_y(const std::vector<long>& y) {
  std::vector<Int> out;
  for (long v : y) out.emplace_back(v);
  return out;
}

Rat from_frac(const py::object& o) {
  const std::string s = py::str(o);
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

}  // namespace

PYBIND11_MODULE(_coxcount, m) {
  m.doc() = "exact morphism counting on del Pezzo Cox presentations";

  py::class_<CoxPresentation>(m, "Surface")
      .def_readonly("name", &CoxPresentation::name)
      .def_readonly("picard_rank", &CoxPresentation::picard_rank)
      .def_readonly("labels", &CoxPresentation::labels)
      .def("dim", &CoxPresentation::dim)
      .def("anticanonical_dual",
           [](const CoxPresentation& cox) {
             py::list out;
             for (const auto& c : cox.dual_coords(anticanonical(cox))) out.append(py_int(c));
             return out;
           })
      .def("num_admissible_choices",
           [](const CoxPresentation& cox) { return admissible_choices(cox).size(); })
      .def("hypothesis_ok", [](const CoxPresentation& cox) { return check_face_hypothesis(cox).ok; });

  m.def("builtin_sextic", &builtin_sextic_a1);
  m.def("load_surface_file", &load_surface_file, py::arg("path"));
  m.def("load_surface", &load_surface, py::arg("json_text"));

  m.def(
      "point_count",
      [](const CoxPresentation& cox, long qv) { return py_int(count::surface_point_count(cox, qv)); },
      py::arg("surface"), py::arg("qv"));

  m.def(
      "hom_count",
      [](const CoxPresentation& cox, long q, const std::vector<long>& y) {
        return py_int(count::hom_count(cox, cox.default_choice(), q, to_y(y)));
      },
      py::arg("surface"), py::arg("q"), py::arg("y"));

  m.def(
      "hom_count_oracle",
      [](const CoxPresentation& cox, long q, const std::vector<long>& y) {
        return py_int(count::hom_count_oracle(cox, q, to_y(y)));
      },
      py::arg("surface"), py::arg("q"), py::arg("y"));

  m.def(
      "n_terms",
      [](const CoxPresentation& cox, long q, const std::vector<long>& y) {
        const auto t = count::n_terms(cox, cox.default_choice(), q, to_y(y));
        return py::make_tuple(py_frac(t.n0), py_frac(t.n1), py_frac(t.n2));
      },
      py::arg("surface"), py::arg("q"), py::arg("y"));

  m.def(
      "gamma",
      [](const CoxPresentation& cox, long q, int B) {
        const auto g = count::gamma_truncated(cox, q, B);
        py::dict d;
        d["value"] = g.value;
        d["tail_bound"] = g.tail_bound;
        d["partials"] = g.partials;
        return d;
      },
      py::arg("surface"), py::arg("q"), py::arg("B"));

  m.def(
      "alpha",
      [](const CoxPresentation& cox) {
        return py_frac(cones::volume(cones::dual_cone_section(cox)));
      },
      py::arg("surface"));

  m.def(
      "coverage",
      [](const CoxPresentation& cox, const std::vector<py::object>& lambdas) {
        py::list out;
        for (const auto& l : lambdas) {
          const auto row = cones::coverage_ratio(cox, from_frac(l));
          py::dict d;
          d["lambda"] = py_frac(row.lambda);
          d["vol_full"] = py_frac(row.vol_full);
          d["vol_covered"] = py_frac(row.vol_covered);
          d["ratio"] = py_frac(row.ratio);
          out.append(d);
        }
        return out;
      },
      py::arg("surface"), py::arg("lambdas"));

  m.def(
      "count_csv",
      [](const CoxPresentation& cox, long q, long bound, bool oracle) {
        const auto g = count::gamma_truncated(cox, q, 8);
        const auto rep =
            count::count_records(cox, cox.default_choice(), q, bound, g.value, oracle);
        return count::records_csv(rep);
      },
      py::arg("surface"), py::arg("q"), py::arg("bound"), py::arg("oracle") = false);
}
