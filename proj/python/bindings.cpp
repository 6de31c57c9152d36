#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "avgcycles/averaging.hpp"
#include "avgcycles/blowup.hpp"
#include "avgcycles/error.hpp"
#include "avgcycles/flowsim.hpp"
#include "avgcycles/pipeline.hpp"
#include "avgcycles/roots.hpp"

namespace py = pybind11;
using namespace avgcycles;

namespace {

// Problem plus its flow factor, built once.
class Model {
public:
    explicit Model(Problem p) : problem_(std::move(p)), ff_(build_flow_factor(problem_.params, base_angle(problem_.line))) {}

    static Model from_json(const std::string& text) { return Model(parse_problem(text)); }
    static Model from_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_json(ss.str());
    }

    std::string line() const { return std::string(to_string(problem_.line)); }
    double flow_factor(double theta) const { return ff_.value(theta); }
    std::map<int, double> averaged(double tol) const
    {
        return assemble_h(compute_coefficient_table(problem_, ff_, tol)).coeffs();
    }
    double h1_direct(double z, double tol) const { return avgcycles::h1_direct(problem_, ff_, z, tol); }
    double displacement(double z, double eps, double tol) const
    {
        return avgcycles::displacement(problem_, ff_, z, eps, tol);
    }
    std::string to_json() const { return serialize_problem(problem_); }

private:
    Problem problem_;
    FlowFactor ff_;
};

py::dict root_report(const std::map<int, double>& coeffs, std::optional<double> z_max, double tol)
{
    const AveragedPolynomial h(coeffs);
    const auto rep = isolate_positive_roots(h, z_max, tol);
    py::list roots;
    for (const auto& r : rep.roots) {
        py::dict d;
        d["z_star"] = r.z_star;
        d["h_deriv"] = r.h_deriv;
        d["simple"] = r.simple;
        roots.append(d);
    }
    py::dict out;
    out["roots"] = roots;
    out["descartes_bound"] = rep.descartes_bound;
    out["suspected_multiple"] = rep.suspected_multiple;
    return out;
}

py::dict run_reproduce(const std::string& name, bool skip_verify)
{
    ReproduceOptions o;
    o.skip_verify = skip_verify;
    const auto r = reproduce(parse_example(name), o);
    py::dict out;
    out["h"] = r.h.coeffs();
    out["roots"] = r.roots.simple_roots();
    out["descartes_bound"] = r.roots.descartes_bound;
    py::list crit;
    for (const auto& c : evaluate_reproduction(r)) crit.append(py::make_tuple(c.name, c.passed, c.detail));
    out["criteria"] = crit;
    out["problem_json"] = serialize_problem(r.problem);
    if (r.cycles) out["cycles_json"] = cycle_report_json(*r.cycles);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Averaged limit-cycle prediction for piecewise perturbed quasi-homogeneous centers";
    m.attr("__version__") = AVGCYCLES_VERSION;

    static py::exception<Error> exc(m, "AvgcyclesError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.what());
        }
    });

    m.def(
        "validate_center",
        [](double a, double b, double c, double d) {
            const auto p = validate_center(a, b, c, d);
            return check_g_nonvanishing(p).min_abs_g;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
        "Check the center condition; returns min |g| or raises AvgcyclesError.");

    py::class_<Model>(m, "Model")
        .def_static("from_json", &Model::from_json, py::arg("text"))
        .def_static("from_file", &Model::from_file, py::arg("path"))
        .def_property_readonly("line", &Model::line)
        .def("flow_factor", &Model::flow_factor, py::arg("theta"))
        .def("averaged", &Model::averaged, py::arg("tol") = 1e-9, "Exponent -> coefficient of h(z).")
        .def("h1_direct", &Model::h1_direct, py::arg("z"), py::arg("tol") = 1e-9)
        .def("displacement", &Model::displacement, py::arg("z"), py::arg("eps"), py::arg("tol") = 1e-11,
             py::call_guard<py::gil_scoped_release>())
        .def("to_json", &Model::to_json);

    m.def("roots", &root_report, py::arg("coeffs"), py::arg("z_max") = py::none(), py::arg("tol") = 1e-12);
    m.def("reproduce", &run_reproduce, py::arg("name"), py::arg("skip_verify") = true);
}
