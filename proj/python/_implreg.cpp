#include "implreg/bounds.hpp"
#include "implreg/cli.hpp"
#include "implreg/dataset.hpp"
#include "implreg/errors.hpp"
#include "implreg/estimators.hpp"
#include "implreg/experiments.hpp"
#include "implreg/io.hpp"
#include "implreg/risk.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace implreg;

namespace {

py::dict risk_dict(const RiskEstimate& r) {
    py::dict d;
    d["mean"] = r.mean;
    d["stderr"] = r.std_error;
    d["trials"] = r.trials;
    d["method"] = to_string(r.method);
    d["bias"] = r.bias ? py::cast(*r.bias) : py::none();
    d["variance"] = r.variance ? py::cast(*r.variance) : py::none();
    return d;
}

BoundConstants constants_from(const std::string& doc) {
    return doc.empty() ? BoundConstants{} : constants_from_json(json::parse(doc));
}

}  // namespace

PYBIND11_MODULE(_implreg, m) {
    m.doc() = "Ridge, early-stopped GD and single-pass SGD on linear regression";
    m.attr("__version__") = IMPLREG_VERSION;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<GuardError>(m, "GuardError", PyExc_RuntimeError);

    py::class_<ProblemInstance>(m, "Problem")
        .def_property_readonly("dim", &ProblemInstance::dim)
        .def_property_readonly("spectrum", [](const ProblemInstance& p) { return Eigen::VectorXd(p.spectrum.vector()); })
        .def_readonly("wstar", &ProblemInstance::wstar)
        .def_readonly("sigma2", &ProblemInstance::sigma2)
        .def("signal_energy", &ProblemInstance::signal_energy)
        .def("to_json", [](const ProblemInstance& p) { return problem_to_json(p).dump(); });

    m.def("power_law_problem", &make_power_law_problem, py::arg("a"), py::arg("r"), py::arg("d"), py::arg("sigma2"),
          py::arg("delta") = 0.1);
    m.def("spike_problem", &make_spike_problem, py::arg("n"), py::arg("d"), py::arg("sigma2"));
    m.def("problem_from_json", [](const std::string& doc) { return problem_from_json(json::parse(doc)); });

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](Eigen::MatrixXd X, Eigen::VectorXd y) { return Dataset(std::move(X), std::move(y)); }),
             py::arg("X"), py::arg("y"))
        .def_property_readonly("X", &Dataset::X)
        .def_property_readonly("y", &Dataset::y)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("d", &Dataset::d);

    m.def("sample_dataset", &sample_dataset, py::arg("problem"), py::arg("n"), py::arg("seed"));
    m.def("ridge_fit", &ridge_fit, py::arg("data"), py::arg("lam"));
    m.def(
        "gd_fit",
        [](const Dataset& data, double eta, std::int64_t t) {
            const std::vector<std::int64_t> ts{t};
            return gd_path(data, eta, ts).front();
        },
        py::arg("data"), py::arg("eta"), py::arg("t"));
    m.def("max_stable_stepsize", &max_stable_stepsize, py::arg("data"));
    m.def("sgd_run", &sgd_run, py::arg("problem"), py::arg("n"), py::arg("eta0"), py::arg("seed"));
    m.def("excess_risk", &excess_risk, py::arg("w"), py::arg("problem"));

    m.def(
        "ridge_risk", [](const Dataset& d, const ProblemInstance& p, double lam) { return risk_dict(ridge_conditional_risk(d, p, lam)); },
        py::arg("data"), py::arg("problem"), py::arg("lam"));
    m.def(
        "gd_risk",
        [](const Dataset& d, const ProblemInstance& p, double eta, std::int64_t t) {
            return risk_dict(gd_conditional_risk(d, p, eta, t));
        },
        py::arg("data"), py::arg("problem"), py::arg("eta"), py::arg("t"));
    m.def(
        "sgd_risk", [](const ProblemInstance& p, std::size_t n, double eta0) { return risk_dict(sgd_exact_risk_gaussian(p, n, eta0)); },
        py::arg("problem"), py::arg("n"), py::arg("eta0"));

    m.def(
        "bound_json",
        [](const std::string& kind, const ProblemInstance& p, std::size_t n, double lam, double eta, std::int64_t t,
           double eta0, const std::string& constants) {
            const auto c = constants_from(constants);
            BoundReport r;
            if (kind == "ridge") r = ridge_bound(p, n, lam, c);
            else if (kind == "sgd") r = sgd_bound(p, n, eta0, c);
            else if (kind == "gd_ridge_type") r = gd_ridge_type_bound(p, n, eta, t, c);
            else if (kind == "gd_lower") r = gd_lower_bound(p, n, eta, t, c);
            else if (kind == "gd_sgd_type") r = gd_sgd_type_bound(p, n, eta, t, c);
            else throw ValidationError("unknown bound kind: " + kind);
            return bound_report_to_json(r).dump();
        },
        py::arg("kind"), py::arg("problem"), py::arg("n"), py::arg("lam") = 0.0, py::arg("eta") = 0.0,
        py::arg("t") = 0, py::arg("eta0") = 0.0, py::arg("constants") = "");
    m.def(
        "power_law_exponent",
        [](const std::string& alg, double a, double r) { return power_law_exponent(algorithm_from_string(alg), a, r); },
        py::arg("algorithm"), py::arg("a"), py::arg("r"));

    m.def(
        "validate_json",
        [](const std::string& doc, const std::string& command) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& d : validate_config(json::parse(doc), command))
                out.emplace_back(d.level == Diagnostic::Level::error ? "error" : "warning", d.message);
            return out;
        },
        py::arg("doc"), py::arg("command") = "");
    m.def(
        "run_json",
        [](const std::string& doc, const std::string& command, std::optional<std::string> out,
           std::optional<std::uint64_t> seed, std::optional<std::size_t> trials, std::optional<std::size_t> threads) {
            CliOverrides ov{out, seed, trials, threads};
            std::ostringstream err;
            int code = 2;
            {
                py::gil_scoped_release release;
                try {
                    code = run_config(parse_run_config(json::parse(doc), command, ov), err);
                } catch (const std::exception& e) {
                    err << e.what() << '\n';
                }
            }
            return std::make_pair(code, err.str());
        },
        py::arg("doc"), py::arg("command"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
        py::arg("trials") = py::none(), py::arg("threads") = py::none());
}
