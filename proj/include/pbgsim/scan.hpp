#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbgsim/config.hpp"

namespace pbgsim {

// Canonical observable names: principal squeeze variances for the six modes
// and the four emitted pairs, Fano factors for the same, second reduced
// moments and their output/input transfer ratios per mode.
const std::vector<std::string>& observable_names();
bool is_observable(const std::string& name);

struct ScanPoint {
    double axis1 = 0.0;
    double axis2 = 0.0;
    // 0 ok, 1 invalid parameter combination, 2 mean-field solver failure,
    // 3 fluctuation propagation or block-inversion failure
    int status = 0;
    std::string message;
    double flux_drift = 0.0;
    double io_identity = 0.0;
    double prop_identity_rel = 0.0;
    int newton_iterations = -1;
    std::vector<std::optional<double>> values;
};

struct ScanResult {
    std::vector<std::string> observables;
    bool has_axis1 = false;
    bool has_axis2 = false;
    int n1 = 1;
    int n2 = 1;
    // Row-major: axis1 outer, axis2 inner.
    std::vector<ScanPoint> points;
};

// Full pipeline for one parameter point; failures are recorded in the status
// rather than thrown, so scans skip bad points and keep going.
ScanPoint evaluate_point(const Config& config,
                         const std::vector<std::string>& observables);

// Sweeps the configured axes with a bounded worker pool (size from the
// PBGSIM_WORKERS environment variable, default hardware concurrency) and
// collects rows in deterministic row-major order regardless of scheduling.
// Throws if the base configuration is invalid or every point failed.
ScanResult run_scan(const Config& config);

struct ScanOutputPaths {
    std::string csv;
    std::string plot;
    std::string meta;
};

// Writes <stem>.csv (one record per point, empty cells for undefined values),
// <stem>.gp (gnuplot script over the CSV), and <stem>.meta.txt (resolved
// config echo) into scan.output_dir, creating it if needed.
ScanOutputPaths write_scan_outputs(const Config& config, const ScanResult& result);

int worker_count();

}  // namespace pbgsim
