#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <numbers>
#include <string>

#include "jmgt/acceptance.hpp"
#include "jmgt/dispersion.hpp"
#include "jmgt/errors.hpp"
#include "jmgt/experiments.hpp"
#include "jmgt/kernels.hpp"
#include "jmgt/linear.hpp"
#include "jmgt/spaces.hpp"

namespace py = pybind11;
using namespace jmgt;

namespace {

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

SpectralArray to_spectrum(const FrequencyGrid& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
    if (static_cast<std::size_t>(a.size()) != g.size())
        throw ContractViolation("array has " + std::to_string(a.size()) + " entries, grid has " +
                                std::to_string(g.size()));
    return SpectralArray(a.data(), a.data() + a.size());
}

py::array_t<cplx> to_array(const std::vector<SpectralArray>& rows) {
    const std::size_t m = rows.empty() ? 0 : rows.front().size();
    py::array_t<cplx> out({rows.size(), m});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < m; ++k) v(i, k) = rows[i][k];
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral solvers for the fractional JMGT equation";
    m.attr("__version__") = JMGT_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double, double, double>(), py::arg("tau"), py::arg("delta"),
             py::arg("b_over_a") = 2.0, py::arg("sigma") = 1.0, py::arg("lambda_") = 1.0)
        .def_property_readonly("tau", &ModelParams::tau)
        .def_property_readonly("delta", &ModelParams::delta)
        .def_property_readonly("b_over_a", &ModelParams::b_over_a)
        .def_property_readonly("sigma", &ModelParams::sigma)
        .def_property_readonly("lambda_", &ModelParams::lambda)
        .def_property_readonly("beta", &ModelParams::beta)
        .def("with_lambda", &ModelParams::with_lambda)
        .def("__repr__", &ModelParams::describe);

    py::enum_<Regime>(m, "Regime")
        .value("small_freq", Regime::small_freq)
        .value("transition", Regime::transition)
        .value("large_freq", Regime::large_freq);

    py::class_<RootTriple>(m, "RootTriple")
        .def_readonly("mu1", &RootTriple::mu1)
        .def_readonly("mu2", &RootTriple::mu2)
        .def_readonly("mu3", &RootTriple::mu3)
        .def_readonly("mu_R", &RootTriple::mu_R)
        .def_readonly("mu_I", &RootTriple::mu_I)
        .def_readonly("discriminant", &RootTriple::discriminant)
        .def_readonly("regime", &RootTriple::regime)
        .def_readonly("near_degenerate", &RootTriple::near_degenerate);

    py::class_<Thresholds>(m, "Thresholds")
        .def_readonly("N0", &Thresholds::n0)
        .def_readonly("eps0", &Thresholds::eps0)
        .def_readonly("N0_raw", &Thresholds::n0_raw)
        .def_readonly("eps0_raw", &Thresholds::eps0_raw);

    m.def("characteristic_roots", &characteristic_roots, py::arg("xi"), py::arg("params"));
    m.def("cubic_residual", &cubic_residual, py::arg("mu"), py::arg("xi"), py::arg("params"));
    m.def("thresholds", &thresholds, py::arg("params"));

    m.def(
        "kernel_eval",
        [](double t, double xi, const ModelParams& p) {
            const auto k = kernel_eval(t, xi, p);
            py::array_t<cplx> out({3, 3});
            auto v = out.mutable_unchecked<2>();
            for (int d = 0; d < 3; ++d)
                for (int j = 0; j < 3; ++j) v(d, j) = k.value[d][j];
            return out;
        },
        py::arg("t"), py::arg("xi"), py::arg("params"),
        "3x3 array: row d holds the d-th time derivative of K_0, K_1, K_2.");
    m.def("geometric_time_grid", &geometric_time_grid, py::arg("t_max"), py::arg("per_octave") = 1,
          py::arg("t_first") = 0.01);
    m.def("linear_decay_exponent", &linear_decay_exponent, py::arg("n"), py::arg("m"), py::arg("s"),
          py::arg("sigma"));

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init<int, int, double>(), py::arg("dims"), py::arg("modes_per_axis"),
             py::arg("period") = 2.0 * std::numbers::pi)
        .def_property_readonly("dims", &FrequencyGrid::dims)
        .def_property_readonly("modes_per_axis", &FrequencyGrid::modes_per_axis)
        .def_property_readonly("period", &FrequencyGrid::period)
        .def_property_readonly("size", &FrequencyGrid::size)
        .def("magnitudes", [](const FrequencyGrid& g) {
            auto s = g.magnitudes();
            return py::array_t<double>(s.size(), s.data());
        });

    m.def(
        "sobolev_hom_norm",
        [](const FrequencyGrid& g, py::array_t<cplx> f, double s) { return sobolev_hom_norm(g, to_spectrum(g, f), s); },
        py::arg("grid"), py::arg("f_hat"), py::arg("s"));
    m.def(
        "e_norm",
        [](const FrequencyGrid& g, py::array_t<cplx> f, double alpha, double s) {
            return e_norm(g, to_spectrum(g, f), alpha, s);
        },
        py::arg("grid"), py::arg("f_hat"), py::arg("alpha"), py::arg("s"));
    m.def(
        "propagate_dt",
        [](const FrequencyGrid& g, py::array_t<cplx> w0, py::array_t<cplx> w1, py::array_t<cplx> w2,
           const ModelParams& p, const std::vector<double>& times) {
            LinearData d{to_spectrum(g, w0), to_spectrum(g, w1), to_spectrum(g, w2)};
            return to_array(propagate_dt(g, d, p, times));
        },
        py::arg("grid"), py::arg("w0"), py::arg("w1"), py::arg("w2"), py::arg("params"), py::arg("times"),
        "Time derivative of the linear solution, one row per sample time.");

    m.def("scenarios", [] {
        std::vector<std::string> out;
        for (auto s : all_scenarios()) out.emplace_back(scenario_name(s));
        return out;
    });
    m.def(
        "run_experiment",
        [](const std::string& scenario, const std::map<std::string, std::string>& options) {
            const auto cfg = resolve_config(scenario_from_name(scenario), nullptr, options);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(cfg);
            }
            py::dict out;
            out["exit_code"] = r.exit_code;
            out["message"] = r.message;
            out["results"] = to_python(r.results);
            out["files"] = r.files;
            out["output_dir"] = cfg.output_dir;
            return out;
        },
        py::arg("scenario"), py::arg("options") = std::map<std::string, std::string>{},
        "Run a scenario with string-valued options (same keys as the CLI flags, plus 'output').");
    m.def(
        "run_criterion",
        [](int id, std::uint64_t seed) {
            AcceptanceOptions opt;
            opt.seed = seed;
            CriterionResult r;
            {
                py::gil_scoped_release release;
                r = run_criterion(id, opt);
            }
            py::dict out;
            out["id"] = r.id;
            out["title"] = r.title;
            out["passed"] = r.passed;
            out["seconds"] = r.seconds;
            out["detail"] = r.detail;
            py::dict metrics;
            for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
            out["metrics"] = metrics;
            return out;
        },
        py::arg("id"), py::arg("seed") = AcceptanceOptions{}.seed);
}
