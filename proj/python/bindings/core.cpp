#include "quantact/dga.hpp"
#include "quantact/numfio.hpp"
#include "quantact/session.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace quantact;

namespace {

std::shared_ptr<const Action> builtin(const std::string& spec) {
    return std::make_shared<const Action>(builtin_action(spec));
}

Cochain unit_system(const std::shared_ptr<const Action>& action, int order) {
    return Cochain::constant(action, 1, FormalSymbol::one(action->dimension(), order));
}

py::dict report_dict(const Report& r) {
    py::list checks;
    for (const auto& e : r.entries()) {
        py::dict c;
        c["name"] = e.name;
        c["passed"] = e.passed;
        c["exact"] = e.certificate == Certificate::Exact;
        c["detail"] = e.detail;
        checks.append(c);
    }
    py::dict d;
    d["title"] = r.title();
    d["passed"] = r.passed();
    d["checks"] = checks;
    d["text"] = r.str();
    return d;
}

GridSpec grid_of(std::size_t dimension, std::size_t points, double half_width, double hbar) {
    GridSpec g{dimension, points, half_width, hbar};
    g.validate();
    return g;
}

py::array_t<std::complex<double>> to_array(const WaveGrid& w) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(w.size()));
    std::copy(w.data().begin(), w.data().end(), out.mutable_data());
    return out;
}

WaveGrid from_array(const GridSpec& spec, const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& a) {
    WaveGrid w(spec);
    if (static_cast<std::size_t>(a.size()) != w.size()) {
        throw std::invalid_argument("array has " + std::to_string(a.size()) + " samples, grid needs " +
                                    std::to_string(w.size()));
    }
    std::copy(a.data(), a.data() + a.size(), w.data().begin());
    return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Symbolic and numerical quantization of group actions";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NotMaurerCartan>(m, "NotMaurerCartan", PyExc_ValueError);
    py::register_exception<BasisSpanError>(m, "BasisSpanError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<Expr>(m, "Expr")
        .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
        .def(py::init<long>())
        .def("__str__", &Expr::str)
        .def("__repr__", [](const Expr& e) { return "Expr('" + e.str() + "')"; })
        .def("is_zero", [](const Expr& e) { return is_zero(e).zero; })
        .def("diff", [](const Expr& e, const std::string& v) { return diff(e, v); })
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self == py::self)
        .def(-py::self)
        .def("__hash__", [](const Expr& e) { return std::hash<std::string>{}(e.str()); });
    m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));

    m.def("builtin_actions", &builtin_action_names);
    m.def("check_action", [](const std::string& spec) { return report_dict(check_action(builtin_action(spec))); },
          py::arg("action"));

    m.def(
        "phase_is_cocycle",
        [](const std::string& action, const std::string& phase) {
            const auto s = PhaseCochain::from_template(builtin(action), parse(phase, builtin_action(action).binding()));
            const auto v = delta_phase(s).zero_verdict();
            return py::make_tuple(v.zero, v.certificate == Certificate::Exact);
        },
        py::arg("action"), py::arg("phase"), "delta S = 0, with whether the verdict is exact");
    m.def(
        "exp_system_is_mc",
        [](const std::string& action, const std::string& phase, int order) {
            const auto s = PhaseCochain::from_template(builtin(action), parse(phase, builtin_action(action).binding()));
            const auto v = is_maurer_cartan(exp_system(s, order));
            return py::make_tuple(v.zero, v.certificate == Certificate::Exact);
        },
        py::arg("action"), py::arg("phase"), py::arg("order") = 2);

    m.def(
        "cohomology_dims",
        [](const std::string& action, int degree, int n_max) {
            auto act = builtin(action);
            const auto basis = CoefficientBasis::monomials(act->coordinates(), degree);
            py::list rows;
            for (const auto& r : cohomology_dims(act, basis, unit_system(act, n_max), n_max)) {
                py::dict d;
                d["n"] = r.n;
                d["cochain_dims"] = r.cochain_dims;
                d["ranks"] = r.ranks;
                d["h"] = r.h;
                rows.append(d);
            }
            return rows;
        },
        py::arg("action"), py::arg("basis_degree"), py::arg("n_max"),
        "Cohomology of the unit system with monomial coefficients of degree <= basis_degree");

    m.def(
        "run_config",
        [](const std::string& text, const std::string& base_dir, const std::map<std::string, std::string>& overrides) {
            Config c = Config::parse(text, base_dir);
            for (const auto& [k, v] : overrides) {
                c.set("session", k, v);
            }
            const auto r = run_task(SessionConfig::from(c));
            py::dict d = report_dict(r.report);
            d["artifacts"] = r.artifacts;
            return d;
        },
        py::arg("text"), py::arg("base_dir") = ".", py::arg("overrides") = std::map<std::string, std::string>{});
    m.def("task_names", &task_names);

    m.def(
        "gaussian",
        [](std::size_t dimension, std::size_t points, double half_width, double hbar, std::vector<double> center,
           double width, std::vector<double> wavevector) {
            return to_array(gaussian(grid_of(dimension, points, half_width, hbar), center, width, wavevector));
        },
        py::arg("dimension"), py::arg("points"), py::arg("half_width"), py::arg("hbar"), py::arg("center"),
        py::arg("width"), py::arg("wavevector") = std::vector<double>{});
    m.def(
        "kn_apply",
        [](const std::string& amplitude, const std::vector<std::string>& coords,
           const py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>& psi, std::size_t points,
           double half_width, double hbar, const std::map<std::string, double>& constants) {
            const auto spec = grid_of(coords.size(), points, half_width, hbar);
            NumericPoint c(constants.begin(), constants.end());
            return to_array(kn_apply(NumericAmplitude{parse(amplitude), coords, c}, from_array(spec, psi)));
        },
        py::arg("amplitude"), py::arg("coords"), py::arg("psi"), py::arg("points"), py::arg("half_width"),
        py::arg("hbar"), py::arg("constants") = std::map<std::string, double>{});
}
