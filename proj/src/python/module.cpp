#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lpdo/json_io.hpp"
#include "lpdo/parse.hpp"

namespace py = pybind11;
using namespace lpdo;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

ParamDeps deps_from_dict(const std::map<std::string, std::string>& d) {
  ParamDeps deps;
  for (const auto& [name, which] : d)
    deps.deps[name] = {which.find('x') != std::string::npos, which.find('y') != std::string::npos};
  return deps;
}

RootDirection root_from_obj(const Lpdo& op, const py::object& o) {
  RootDirection base;
  if (py::isinstance<RootDirection>(o)) {
    base = o.cast<RootDirection>();
  } else {
    std::string text = py::str(o);
    base = text == "inf" ? RootDirection::at_infinity() : RootDirection::finite(parse_expr(text));
  }
  auto classified = classify_root(op, base);
  if (!classified) throw py::value_error("not a root of the principal symbol");
  return *classified;
}

GridSpec spec_from_args(double x0, double x1, double y0, double y1, int nx, int ny) {
  GridSpec g{x0, x1, y0, y1, nx, ny};
  g.validate();
  return g;
}

}  // namespace

PYBIND11_MODULE(lpdofactor, m) {
  m.doc() = "Bivariate linear partial differential operators: symbolic coefficients, "
            "factorization into first-order factors, generalized invariants, gauge "
            "transformations, and grid diagnostics.";

  py::class_<Expr>(m, "Expr")
      .def("__str__", [](const Expr& e) { return to_string(e); })
      .def("__repr__", [](const Expr& e) { return "Expr(" + to_string(e) + ")"; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
      .def("__add__", [](const Expr& a, const Expr& b) { return add(a, b); })
      .def("__sub__", [](const Expr& a, const Expr& b) { return sub(a, b); })
      .def("__mul__", [](const Expr& a, const Expr& b) { return mul(a, b); })
      .def("__truediv__", [](const Expr& a, const Expr& b) { return div(a, b); })
      .def("__neg__", [](const Expr& a) { return neg(a); })
      .def("diff",
           [](const Expr& e, const std::string& v) {
             if (v != "x" && v != "y") throw py::value_error("variable must be 'x' or 'y'");
             return diff(e, v == "x" ? VarId::X : VarId::Y);
           },
           py::arg("var"))
      .def("subs",
           [](const Expr& e, const std::string& name, const Expr& r) {
             if (name == "x") return substitute_var(e, VarId::X, r);
             if (name == "y") return substitute_var(e, VarId::Y, r);
             return substitute_param(e, name, r);
           },
           py::arg("name"), py::arg("replacement"))
      .def("eval",
           [](const Expr& e, double x0, double y0, const std::map<std::string, double>& params) {
             return eval(e, x0, y0, params);
           },
           py::arg("x"), py::arg("y"), py::arg("params") = std::map<std::string, double>{})
      .def("is_zero", [](const Expr& e) { return is_zero(e); })
      .def("zero_verdict", [](const Expr& e) { return std::string(to_string(zero_verdict(e))); });

  py::class_<Lpdo>(m, "Lpdo")
      .def("__str__", [](const Lpdo& a) { return to_string(a); })
      .def("__repr__", [](const Lpdo& a) { return "Lpdo(" + to_string(a) + ")"; })
      .def("__eq__", [](const Lpdo& a, const Lpdo& b) { return a == b; })
      .def("__add__", [](const Lpdo& a, const Lpdo& b) { return a + b; })
      .def("__sub__", [](const Lpdo& a, const Lpdo& b) { return a - b; })
      .def("__mul__", [](const Lpdo& a, const Lpdo& b) { return compose(a, b); })
      .def("order", [](const Lpdo& a) { return a.order(); })
      .def("coeff", [](const Lpdo& a, int j, int k) { return a.coeff(j, k); }, py::arg("j"),
           py::arg("k"))
      .def("apply", [](const Lpdo& a, const Expr& u) { return apply(a, u); }, py::arg("u"))
      .def("transpose", [](const Lpdo& a) { return transpose(a); })
      .def("gauge", [](const Lpdo& a, const Expr& phi) { return gauge_conjugate(a, phi); },
           py::arg("phi"))
      .def("to_dict", [](const Lpdo& a) { return json_to_py(to_json(a)); });

  py::class_<RootDirection>(m, "RootDirection")
      .def_property_readonly("infinite", [](const RootDirection& r) { return r.infinite; })
      .def_property_readonly("multiplicity", [](const RootDirection& r) { return r.multiplicity; })
      .def_property_readonly("omega",
                             [](const RootDirection& r) -> py::object {
                               if (r.infinite) return py::none();
                               return py::cast(r.omega);
                             })
      .def("__repr__", [](const RootDirection& r) { return "RootDirection(" + to_string(r) + ")"; });

  m.def("parse_expr",
        [](const std::string& text, const std::map<std::string, std::string>& depends) {
          return parse_expr(text, deps_from_dict(depends));
        },
        py::arg("text"), py::arg("depends") = std::map<std::string, std::string>{});
  m.def("parse_operator",
        [](const std::string& text, const std::map<std::string, std::string>& depends) {
          return parse_operator(text, deps_from_dict(depends));
        },
        py::arg("text"), py::arg("depends") = std::map<std::string, std::string>{});
  m.def("param",
        [](const std::string& name, const std::string& depends) {
          return make_param(name, depends.find('x') != std::string::npos,
                            depends.find('y') != std::string::npos);
        },
        py::arg("name"), py::arg("depends") = "");

  m.def("roots", [](const Lpdo& a) {
    RootAnalysis an = roots(a);
    py::dict out;
    py::list rs;
    for (const auto& r : an.roots) rs.append(py::cast(r));
    out["roots"] = rs;
    out["unresolved"] = an.unresolved;
    return out;
  });

  m.def("extract_left_factor",
        [](const Lpdo& a, const py::object& root) {
          return json_to_py(to_json(extract_left_factor(a, root_from_obj(a, root))));
        },
        py::arg("op"), py::arg("root"));
  m.def("extract_right_factor",
        [](const Lpdo& a, const py::object& root) {
          return json_to_py(to_json(extract_right_factor(a, root_from_obj(a, root))));
        },
        py::arg("op"), py::arg("root"));
  m.def("riccati_obstruction",
        [](const Lpdo& a, const py::object& root) {
          return json_to_py(to_json(riccati_obstruction(a, root_from_obj(a, root))));
        },
        py::arg("op"), py::arg("root"));
  m.def("verify_riccati",
        [](const Lpdo& a, const py::object& root, const Expr& candidate) {
          return json_to_py(to_json(verify_riccati(a, root_from_obj(a, root), candidate)));
        },
        py::arg("op"), py::arg("root"), py::arg("candidate"));
  m.def("laplace_invariants", [](const Lpdo& a) {
    auto [ah, bh] = laplace_invariants(a);
    return py::make_tuple(ah, bh);
  });
  m.def("full_factorization",
        [](const Lpdo& a, bool all, const std::vector<py::object>& user_roots,
           const std::vector<Expr>& riccati) {
          FactorOptions fo;
          fo.all = all;
          for (const auto& r : user_roots) fo.user_roots.push_back(root_from_obj(a, r));
          fo.riccati_candidates = riccati;
          return json_to_py(to_json(full_factorization(a, fo)));
        },
        py::arg("op"), py::arg("all") = false, py::arg("user_roots") = std::vector<py::object>{},
        py::arg("riccati") = std::vector<Expr>{});

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init(&spec_from_args), py::arg("x0") = -10.0, py::arg("x1") = 10.0,
           py::arg("y0") = -10.0, py::arg("y1") = 10.0, py::arg("nx") = 200, py::arg("ny") = 200)
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny);

  m.def("sample",
        [](const Expr& e, const GridSpec& spec) {
          GridField f = sample(e, spec);
          py::dict out;
          out["summary"] = json_to_py(summary_json(f));
          py::list values;
          for (int i = 0; i < spec.nx; ++i) {
            py::list row;
            for (int j = 0; j < spec.ny; ++j) row.append(f.at(i, j));
            values.append(row);
          }
          out["values"] = values;
          return out;
        },
        py::arg("expr"), py::arg("spec") = GridSpec{});
  m.def("invariant_field",
        [](const Lpdo& a, const py::object& root, const GridSpec& spec) {
          GridField f = invariant_field(a, root_from_obj(a, root), spec);
          py::dict out;
          out["summary"] = json_to_py(summary_json(f));
          out["source"] = py::cast(f.source);
          return out;
        },
        py::arg("op"), py::arg("root"), py::arg("spec") = GridSpec{});
  m.def("scale_operator",
        [](const Lpdo& a, const Expr& f, const std::vector<std::pair<int, int>>& mask) {
          return scale_operator(a, f, mask);
        },
        py::arg("op"), py::arg("f"), py::arg("mask"));
  m.def("r_function_check",
        [](const std::vector<double>& b, const std::vector<double>& c,
           const std::vector<double>& d, double eps, const GridSpec& spec) {
          if (b.size() != 3 || c.size() != 3 || d.size() != 3)
            throw py::value_error("b, c, d must each have three entries");
          LinearCoeffs lc;
          auto to_rat = [](double v) {
            // Linear-coefficient inputs are exact rationals in practice.
            return Rational(static_cast<long long>(v * 1000000.0), 1000000LL);
          };
          for (int i = 0; i < 3; ++i) {
            lc.b[static_cast<size_t>(i)] = to_rat(b[static_cast<size_t>(i)]);
            lc.c[static_cast<size_t>(i)] = to_rat(c[static_cast<size_t>(i)]);
            lc.d[static_cast<size_t>(i)] = to_rat(d[static_cast<size_t>(i)]);
          }
          RCheckResult res = r_function_check(lc, eps, spec);
          py::dict out;
          out["holds"] = res.holds;
          out["worst"] = res.worst;
          out["at"] = py::make_tuple(res.at_x, res.at_y);
          return out;
        },
        py::arg("b"), py::arg("c"), py::arg("d"), py::arg("eps"), py::arg("spec") = GridSpec{});
}
