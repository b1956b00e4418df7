#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pbgsim/model.hpp"

namespace pbgsim {

// One sweep axis: the scanned value t runs linearly from start to stop and
// each term's target parameter is set to coeff * t. A single term with
// coeff 1 is the common case; multiple terms move parameters in lockstep
// (e.g. opposite-sign coherent seeds).
struct AxisTerm {
    std::string path;   // e.g. "device.k_p.re", "input_state.xi_sf.im"
    double coeff = 1.0;
};

struct ScanAxis {
    std::vector<AxisTerm> terms;
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

struct ScanSettings {
    std::optional<ScanAxis> axis1;
    std::optional<ScanAxis> axis2;
    std::vector<std::string> observables;   // empty means all
    std::string output_dir = ".";
    std::string stem = "scan";
};

struct SolverConfig {
    int grid_points = 1001;
    double tolerance = 1e-10;
    int max_iterations = 50;
    double fluct_tolerance = 1e-8;
};

struct Config {
    WaveguideParams device;
    BoundaryConditions boundary;
    InputState input;
    ScanSettings scan;
    SolverConfig solver;
};

// Complex literals: "1.5", "-2i", "1.5+2i", "1e-3-0.5i".
Complex parse_complex(const std::string& text);
std::string format_complex(Complex value);

Config parse_config(std::istream& in);
Config parse_config_string(const std::string& text);
Config load_config_file(const std::string& path);

// Canonical text form; parse(serialize(c)) reproduces c exactly and
// serialize is a fixed point on its own output.
std::string serialize_config(const Config& config);

// Resolves a scan-axis parameter path to the addressed real field. Complex
// leaves take a ".re"/".im" suffix, real leaves take none.
double& resolve_parameter(Config& config, const std::string& path);

// Structural validation: device/boundary/state field checks, coherent-seed
// consistency (a mode driven by a mean-field boundary amplitude cannot also
// carry a coherent fluctuation input), solver sanity, and axis resolvability.
// Observable names are validated by the scan engine, which owns the list.
void validate(const Config& config);

}  // namespace pbgsim
