#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "whitney/error.hpp"
#include "whitney/harness.hpp"

namespace py = pybind11;
using namespace whitney;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::object& o) {
    return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<Point> points_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, int dim) {
    if (a.ndim() != 2 || a.shape(1) != dim) {
        throw py::value_error("expected an array of shape (m, " + std::to_string(dim) + ")");
    }
    auto r = a.unchecked<2>();
    std::vector<Point> out;
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        Point x(dim);
        for (int k = 0; k < dim; ++k) {
            x[k] = r(i, k);
        }
        out.push_back(x);
    }
    return out;
}

// pybind11 holders cannot be pointers to const
using DecompositionPtr = std::shared_ptr<WhitneyDecomposition>;

} // namespace

PYBIND11_MODULE(_whitney, m) {
    m.doc() = "Whitney decomposition, jet extension and fractional Sobolev seminorm checks";

    py::register_exception<Error>(m, "WhitneyError", PyExc_RuntimeError);

    py::class_<WhitneyDecomposition, DecompositionPtr>(m, "Decomposition")
        .def_property_readonly("dim", &WhitneyDecomposition::dim)
        .def_property_readonly("max_depth", &WhitneyDecomposition::max_depth)
        .def_property_readonly("domain_exp", &WhitneyDecomposition::domain_exp)
        .def_property_readonly("num_cubes", [](const WhitneyDecomposition& w) { return w.cubes().size(); })
        .def_property_readonly("num_fringe", [](const WhitneyDecomposition& w) { return w.fringe().size(); })
        .def("cubes",
             [](const WhitneyDecomposition& w) {
                 std::vector<std::string> ids;
                 ids.reserve(w.cubes().size());
                 for (const auto& q : w.cubes()) {
                     ids.push_back(q.id());
                 }
                 return ids;
             },
             "Cube ids \"level:a1,...\" in enumeration order.")
        .def("sites",
             [](const WhitneyDecomposition& w) {
                 py::array_t<double> out({static_cast<py::ssize_t>(w.sites().size()), static_cast<py::ssize_t>(w.dim())});
                 auto r = out.mutable_unchecked<2>();
                 for (std::size_t i = 0; i < w.sites().size(); ++i) {
                     for (int k = 0; k < w.dim(); ++k) {
                         r(static_cast<py::ssize_t>(i), k) = w.sites()[i][k];
                     }
                 }
                 return out;
             })
        .def("locate",
             [](const WhitneyDecomposition& w, const std::vector<double>& x) {
                 std::vector<std::string> ids;
                 for (const auto& q : w.locate(Point::from(x))) {
                     ids.push_back(q.id());
                 }
                 return ids;
             })
        .def("verify_structure", [](const WhitneyDecomposition& w) { return to_py(to_json(w.verify_structure())); })
        .def("to_json", [](const WhitneyDecomposition& w) { return to_py(decomposition_to_json(w)); })
        .def("svg", [](const WhitneyDecomposition& w) { return render_decomposition_svg(w); });

    m.def(
        "decompose",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& sites, double s, double p,
           int domain_exp, int max_depth) -> DecompositionPtr {
            if (sites.ndim() != 2) {
                throw py::value_error("sites must have shape (m, n)");
            }
            const int n = static_cast<int>(sites.shape(1));
            SpaceParams params(n, s, p);
            auto pts = points_from(sites, n);
            py::gil_scoped_release release;
            return std::make_shared<WhitneyDecomposition>(
                WhitneyDecomposition::build(params, std::move(pts), domain_exp, max_depth));
        },
        py::arg("sites"), py::arg("s") = 1.5, py::arg("p") = 4.0, py::arg("domain_exp") = 1,
        py::arg("max_depth") = 10);

    m.def(
        "load_decomposition",
        [](const py::object& data) -> DecompositionPtr {
            return std::make_shared<WhitneyDecomposition>(decomposition_from_json(from_py(data)));
        },
        py::arg("data"));

    py::class_<ExtensionField, std::shared_ptr<ExtensionField>>(m, "Extension")
        .def_static(
            "from_function",
            [](DecompositionPtr w, const py::object& function) {
                auto f = function_from_json(from_py(function), w->dim());
                return std::make_shared<ExtensionField>(w, JetField::from_function(w->params(), *f, w->sites()));
            },
            py::arg("decomposition"), py::arg("function"))
        .def_static(
            "from_jets",
            [](DecompositionPtr w, const py::object& jets) {
                return std::make_shared<ExtensionField>(w, jets_from_json(from_py(jets), w->params()));
            },
            py::arg("decomposition"), py::arg("jets"))
        .def_property_readonly("mode", [](const ExtensionField& tf) { return tf.jets().mode(); })
        .def(
            "eval",
            [](const ExtensionField& tf, const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
               std::vector<int> deriv) {
                const int n = tf.dim();
                auto pts = points_from(x, n);
                if (deriv.empty()) {
                    deriv.assign(static_cast<std::size_t>(n), 0);
                }
                if (static_cast<int>(deriv.size()) != n) {
                    throw py::value_error("deriv has the wrong length");
                }
                MultiIndex k = MultiIndex::from(deriv);
                py::array_t<double> out(static_cast<py::ssize_t>(pts.size()));
                auto r = out.mutable_unchecked<1>();
                py::gil_scoped_release release;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    r(static_cast<py::ssize_t>(i)) = tf.eval(pts[i], k);
                }
                return out;
            },
            py::arg("x"), py::arg("deriv") = std::vector<int>{});

    m.def(
        "seminorm",
        [](const py::object& function, const std::vector<double>& lo, const std::vector<double>& hi, double s,
           double p, const std::string& method, std::size_t budget, std::uint64_t seed) {
            if (lo.size() != hi.size() || lo.empty()) {
                throw py::value_error("lo and hi must have the same nonzero length");
            }
            const int n = static_cast<int>(lo.size());
            SpaceParams params(n, s, p);
            Box box{n, {}, {}};
            for (int i = 0; i < n; ++i) {
                box.lo[i] = lo[static_cast<std::size_t>(i)];
                box.hi[i] = hi[static_cast<std::size_t>(i)];
            }
            AnalyticField field(function_from_json(from_py(function), n), params.floor_s());
            Method m = parse_method(method);
            SeminormEstimate e;
            {
                py::gil_scoped_release release;
                e = gagliardo(field, Region(box), params, m, budget, seed);
            }
            return to_py(to_json(e));
        },
        py::arg("function"), py::arg("lo"), py::arg("hi"), py::arg("s"), py::arg("p"),
        py::arg("method") = "plain-mc", py::arg("budget") = 100000, py::arg("seed") = 1);

    m.def(
        "build_scenario",
        [](const py::object& scenario) {
            return std::const_pointer_cast<WhitneyDecomposition>(build_decomposition(Scenario::from_json(from_py(scenario))));
        },
        py::arg("scenario"));
    m.def(
        "verify",
        [](const py::object& scenario) {
            Scenario sc = Scenario::from_json(from_py(scenario));
            SuiteReport r;
            {
                py::gil_scoped_release release;
                r = verify_all(sc);
            }
            return to_py(to_json(r));
        },
        py::arg("scenario"));
    m.def(
        "bound",
        [](const py::object& scenario) {
            Scenario sc = Scenario::from_json(from_py(scenario));
            BoundednessReport r;
            {
                py::gil_scoped_release release;
                r = run_bound_experiment(sc);
            }
            return to_py(to_json(r));
        },
        py::arg("scenario"));
    m.def(
        "split",
        [](const py::object& scenario) {
            Scenario sc = Scenario::from_json(from_py(scenario));
            TermSplit t;
            {
                py::gil_scoped_release release;
                t = run_term_split(sc);
            }
            return to_py(to_json(t));
        },
        py::arg("scenario"));
}
