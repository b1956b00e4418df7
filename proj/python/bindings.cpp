#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbgsim/config.hpp"
#include "pbgsim/figures.hpp"
#include "pbgsim/fluctuation.hpp"
#include "pbgsim/mean_field.hpp"
#include "pbgsim/scan.hpp"

namespace py = pybind11;
using namespace pbgsim;

namespace {

MeanFieldSolution solve_from_config(const Config& config) {
    validate(config);
    SolverOptions opts;
    opts.grid_points = config.solver.grid_points;
    opts.tolerance = config.solver.tolerance;
    opts.max_iterations = config.solver.max_iterations;
    return solve_bvp(config.device, config.boundary, opts);
}

py::dict mean_field_dict(const Config& config) {
    const MeanFieldSolution sol = solve_from_config(config);
    py::dict out;
    out["z"] = sol.z;
    std::vector<std::vector<Complex>> amps(kModes);
    for (int m = 0; m < kModes; ++m) {
        amps[m].resize(sol.nodes());
        for (int k = 0; k < sol.nodes(); ++k) amps[m][k] = sol.a(m, k);
    }
    out["a"] = amps;
    out["flux_drift"] = flux_drift(sol);
    out["newton_iterations"] = sol.newton_iterations;
    return out;
}

std::vector<std::vector<Complex>> input_output_list(const Config& config) {
    const MeanFieldSolution sol = solve_from_config(config);
    FluctuationOptions opts;
    opts.tolerance = config.solver.fluct_tolerance;
    const Matrix12c u = input_output_matrix(config.device, sol, opts).u;
    std::vector<std::vector<Complex>> rows(kStacked, std::vector<Complex>(kStacked));
    for (int r = 0; r < kStacked; ++r)
        for (int c = 0; c < kStacked; ++c) rows[r][c] = u(r, c);
    return rows;
}

py::dict point_dict(const Config& config) {
    const ScanPoint p = evaluate_point(config, observable_names());
    py::dict out;
    out["status"] = p.status;
    out["message"] = p.message;
    out["flux_drift"] = p.flux_drift;
    out["io_identity"] = p.io_identity;
    out["prop_identity_rel"] = p.prop_identity_rel;
    out["newton_iterations"] = p.newton_iterations;
    py::dict values;
    for (size_t i = 0; i < p.values.size(); ++i) {
        const char* name = observable_names()[i].c_str();
        if (p.values[i])
            values[name] = *p.values[i];
        else
            values[name] = py::none();
    }
    out["values"] = values;
    return out;
}

py::tuple run_to_files(const Config& config) {
    const ScanResult result = run_scan(config);
    const ScanOutputPaths paths = write_scan_outputs(config, result);
    return py::make_tuple(paths.csv, paths.plot, paths.meta);
}

}  // namespace

PYBIND11_MODULE(pbgsim, m) {
    m.doc() = "counter-propagating parametric band-gap waveguide simulator";

    py::class_<Config>(m, "Config")
        .def(py::init<>())
        .def("__repr__", [](const Config& c) { return serialize_config(c); });

    m.def("parse_config", &parse_config_string, py::arg("text"),
          "parse a configuration from its text form");
    m.def("load_config", &load_config_file, py::arg("path"),
          "load a configuration file");
    m.def("serialize_config", &serialize_config, py::arg("config"),
          "canonical text form of a configuration");
    m.def("validate", [](const Config& c) { validate(c); }, py::arg("config"),
          "raise ValueError on an invalid configuration");
    m.def("figure_recipe", &figure_recipe, py::arg("id"),
          "preset scan configuration (ids 2..12)");
    m.def("figure_ids", [] { return figure_ids(); });
    m.def("set_parameter",
          [](Config& c, const std::string& path, double value) { resolve_parameter(c, path) = value; },
          py::arg("config"), py::arg("path"), py::arg("value"),
          "set a parameter by its scan-axis path, e.g. 'device.k_p.re'");
    m.def("get_parameter",
          [](const Config& c, const std::string& path) {
              Config copy = c;
              return resolve_parameter(copy, path);
          },
          py::arg("config"), py::arg("path"));
    m.def("observable_names", [] { return observable_names(); });
    m.def("mean_field", &mean_field_dict, py::arg("config"),
          "solve the nonlinear mean field: returns z, per-mode amplitudes, diagnostics");
    m.def("input_output", &input_output_list, py::arg("config"),
          "12x12 input-output matrix of the linearized fluctuations");
    m.def("point_observables", &point_dict, py::arg("config"),
          "full single-point pipeline: diagnostics plus every observable");
    m.def("run_scan", &run_to_files, py::arg("config"),
          "run the configured sweep and write CSV/plot/meta files; returns their paths");
}
