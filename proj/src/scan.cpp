#include "pbgsim/scan.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "pbgsim/fluctuation.hpp"
#include "pbgsim/mean_field.hpp"
#include "pbgsim/quantum_stats.hpp"

namespace pbgsim {

namespace {

enum class ObsKind { SqueezeSingle, SqueezePair, FanoSingle, FanoPair, ReducedMoment, MomentTransfer };

struct ObsDesc {
    std::string name;
    ObsKind kind;
    int j = 0;
    int k = 0;
};

// Signal/idler pairs that down-conversion correlates: the co-propagating
// pair in each direction plus the two counter-propagating combinations.
constexpr int kPairs[4][2] = {{sF, iF}, {sB, iB}, {sF, iB}, {iF, sB}};

const std::vector<ObsDesc>& observable_table() {
    static const std::vector<ObsDesc> table = [] {
        std::vector<ObsDesc> t;
        for (int j = 0; j < kModes; ++j)
            t.push_back({std::string("lambda_") + mode_key(j), ObsKind::SqueezeSingle, j, 0});
        for (auto [j, k] : kPairs)
            t.push_back({std::string("lambda_") + mode_key(j) + "_" + mode_key(k), ObsKind::SqueezePair, j, k});
        for (int j = 0; j < kModes; ++j)
            t.push_back({std::string("fano_") + mode_key(j), ObsKind::FanoSingle, j, 0});
        for (auto [j, k] : kPairs)
            t.push_back({std::string("fano_") + mode_key(j) + "_" + mode_key(k), ObsKind::FanoPair, j, k});
        for (int j = 0; j < kModes; ++j)
            t.push_back({std::string("rw_") + mode_key(j), ObsKind::ReducedMoment, j, 0});
        for (int j = 0; j < kModes; ++j)
            t.push_back({std::string("tw_") + mode_key(j), ObsKind::MomentTransfer, j, 0});
        return t;
    }();
    return table;
}

const ObsDesc* find_observable(const std::string& name) {
    static const std::unordered_map<std::string, const ObsDesc*> index = [] {
        std::unordered_map<std::string, const ObsDesc*> m;
        for (const ObsDesc& d : observable_table()) m.emplace(d.name, &d);
        return m;
    }();
    auto it = index.find(name);
    return it == index.end() ? nullptr : it->second;
}

std::optional<double> evaluate_observable(const ObsDesc& d, const OutputMoments& out,
                                          const OutputMoments& in) {
    switch (d.kind) {
        case ObsKind::SqueezeSingle: return squeeze_variance(out, d.j);
        case ObsKind::SqueezePair: return pair_squeeze_variance(out, d.j, d.k);
        case ObsKind::FanoSingle: return fano_factor(out, d.j);
        case ObsKind::FanoPair: return fano_factor(out, d.j, d.k);
        case ObsKind::ReducedMoment: return second_reduced_moment(out, d.j);
        case ObsKind::MomentTransfer: return moment_transfer(out, in, d.j);
    }
    return std::nullopt;
}

std::vector<const ObsDesc*> resolve_observables(const std::vector<std::string>& names) {
    std::vector<const ObsDesc*> out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        const ObsDesc* d = find_observable(name);
        if (!d) throw std::invalid_argument("unknown observable '" + name + "'");
        out.push_back(d);
    }
    return out;
}

double axis_value(const ScanAxis& axis, int i) {
    if (axis.count <= 1) return axis.start;
    return axis.start + (axis.stop - axis.start) * static_cast<double>(i) /
                            static_cast<double>(axis.count - 1);
}

void apply_axis(Config& config, const ScanAxis& axis, double t) {
    for (const AxisTerm& term : axis.terms) resolve_parameter(config, term.path) = term.coeff * t;
}

std::string axis_label(const ScanAxis& axis) {
    std::string label;
    for (const AxisTerm& term : axis.terms) {
        if (!label.empty()) label += "+";
        label += term.path;
        if (term.coeff != 1.0) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "*%.12g", term.coeff);
            label += buf;
        }
    }
    return label;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}

void write_csv_file(const std::string& path, const ScanResult& r, const Config& config,
                    const std::string& stamp) {
    std::ofstream out = open_output(path);
    out << "# generated " << stamp << "\n";
    std::string header;
    if (r.has_axis1) header += axis_label(*config.scan.axis1) + ",";
    if (r.has_axis2) header += axis_label(*config.scan.axis2) + ",";
    header += "status,flux_drift,io_identity,prop_identity_rel,newton_iterations";
    for (const std::string& name : r.observables) header += "," + name;
    out << header << "\n";
    for (const ScanPoint& p : r.points) {
        std::string row;
        if (r.has_axis1) row += fmt(p.axis1) + ",";
        if (r.has_axis2) row += fmt(p.axis2) + ",";
        row += std::to_string(p.status);
        for (double v : {p.flux_drift, p.io_identity, p.prop_identity_rel})
            row += std::isfinite(v) ? "," + fmt(v) : ",";
        row += p.newton_iterations >= 0 ? "," + std::to_string(p.newton_iterations) : ",";
        for (size_t i = 0; i < r.observables.size(); ++i) {
            const std::optional<double> v = i < p.values.size() ? p.values[i] : std::optional<double>{};
            row += v ? "," + fmt(*v) : ",";
        }
        out << row << "\n";
    }
    if (!out.flush()) throw std::runtime_error("cannot write '" + path + "'");
}

void write_plot_file(const std::string& path, const ScanResult& r, const Config& config,
                     const std::string& csv_name, const std::string& stamp) {
    std::ofstream out = open_output(path);
    out << "# gnuplot script for " << csv_name << ", generated " << stamp << "\n";
    if (!r.has_axis1) {
        out << "# single-point run; nothing to plot\n";
        return;
    }
    out << "set datafile separator \",\"\n";
    out << "set key autotitle columnhead\n";
    out << "set grid\n";
    out << "set xlabel \"" << axis_label(*config.scan.axis1) << "\"\n";
    // Fixed leading columns: axes, status, three diagnostics, iteration count.
    const int first_value_column = (r.has_axis2 ? 2 : 1) + 5 + 1;
    if (!r.has_axis2) {
        if (r.observables.size() == 1) out << "set ylabel \"" << r.observables[0] << "\"\n";
        out << "plot";
        for (size_t i = 0; i < r.observables.size(); ++i) {
            out << (i ? ", \\\n    " : " \\\n    ") << "\"" << csv_name << "\" using 1:"
                << first_value_column + i << " with lines";
        }
        out << "\n";
    } else {
        out << "set ylabel \"" << axis_label(*config.scan.axis2) << "\"\n";
        out << "set dgrid3d " << r.n1 << "," << r.n2 << "\n";
        out << "set hidden3d\n";
        out << "splot";
        for (size_t i = 0; i < r.observables.size(); ++i) {
            out << (i ? ", \\\n    " : " \\\n    ") << "\"" << csv_name << "\" using 1:2:"
                << first_value_column + i << " with lines";
        }
        out << "\n";
    }
    if (!out.flush()) throw std::runtime_error("cannot write '" + path + "'");
}

void write_meta_file(const std::string& path, const ScanResult& r, const Config& config,
                     const std::string& stamp) {
    std::ofstream out = open_output(path);
    int ok = 0;
    for (const ScanPoint& p : r.points) ok += p.status == 0;
    out << "# generated " << stamp << "\n";
    out << "# points " << r.points.size() << " converged " << ok << "\n\n";
    out << serialize_config(config);
    if (!out.flush()) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

const std::vector<std::string>& observable_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const ObsDesc& d : observable_table()) n.push_back(d.name);
        return n;
    }();
    return names;
}

bool is_observable(const std::string& name) { return find_observable(name) != nullptr; }

ScanPoint evaluate_point(const Config& config, const std::vector<std::string>& observables) {
    const std::vector<const ObsDesc*> descs = resolve_observables(observables);
    ScanPoint p;
    p.flux_drift = p.io_identity = p.prop_identity_rel = std::nan("");
    p.values.assign(descs.size(), std::nullopt);

    try {
        validate(config);
    } catch (const std::exception& e) {
        p.status = 1;
        p.message = e.what();
        return p;
    }

    SolverOptions opts;
    opts.grid_points = config.solver.grid_points;
    opts.tolerance = config.solver.tolerance;
    opts.max_iterations = config.solver.max_iterations;
    MeanFieldSolution sol;
    try {
        sol = solve_bvp(config.device, config.boundary, opts);
    } catch (const std::exception& e) {
        p.status = 2;
        p.message = e.what();
        return p;
    }
    p.flux_drift = flux_drift(sol);
    p.newton_iterations = sol.newton_iterations;

    FluctuationOptions fopts;
    fopts.tolerance = config.solver.fluct_tolerance;
    Matrix12c u;
    try {
        const InputOutputResult io = input_output_matrix(config.device, sol, fopts);
        p.prop_identity_rel = io.prop_defect;
        u = io.u;
    } catch (const std::exception& e) {
        p.status = 3;
        p.message = e.what();
        return p;
    }
    p.io_identity = verify_signature(u);

    const OutputMoments out = output_moments(u, config.input);
    const OutputMoments in = input_moments(config.input);
    for (size_t i = 0; i < descs.size(); ++i) p.values[i] = evaluate_observable(*descs[i], out, in);
    return p;
}

int worker_count() {
    if (const char* env = std::getenv("PBGSIM_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0 && v <= 512) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

ScanResult run_scan(const Config& config) {
    validate(config);
    ScanResult r;
    r.observables = config.scan.observables.empty() ? observable_names() : config.scan.observables;
    resolve_observables(r.observables);
    r.has_axis1 = config.scan.axis1.has_value();
    r.has_axis2 = config.scan.axis2.has_value();
    r.n1 = r.has_axis1 ? config.scan.axis1->count : 1;
    r.n2 = r.has_axis2 ? config.scan.axis2->count : 1;
    const int total = r.n1 * r.n2;
    r.points.resize(total);

    auto compute = [&](int index) {
        Config local = config;
        ScanPoint p;
        const int i1 = index / r.n2;
        const int i2 = index % r.n2;
        double a1 = 0.0, a2 = 0.0;
        if (r.has_axis1) {
            a1 = axis_value(*config.scan.axis1, i1);
            apply_axis(local, *config.scan.axis1, a1);
        }
        if (r.has_axis2) {
            a2 = axis_value(*config.scan.axis2, i2);
            apply_axis(local, *config.scan.axis2, a2);
        }
        p = evaluate_point(local, r.observables);
        p.axis1 = a1;
        p.axis2 = a2;
        r.points[index] = std::move(p);
    };

    const int workers = std::min(worker_count(), total);
    if (workers <= 1) {
        for (int i = 0; i < total; ++i) compute(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) compute(i);
            });
        for (std::thread& t : pool) t.join();
    }

    bool any_ok = false;
    for (const ScanPoint& p : r.points) any_ok |= p.status == 0;
    if (!any_ok) {
        std::string detail = r.points.empty() ? "" : r.points.front().message;
        throw std::runtime_error("no scan point converged (" + std::to_string(total) +
                                 " attempted" + (detail.empty() ? "" : "; first failure: " + detail) +
                                 ")");
    }
    return r;
}

ScanOutputPaths write_scan_outputs(const Config& config, const ScanResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir = config.scan.output_dir.empty() ? fs::path(".") : fs::path(config.scan.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const std::string csv_name = config.scan.stem + ".csv";
    ScanOutputPaths paths;
    paths.csv = (dir / csv_name).string();
    paths.plot = (dir / (config.scan.stem + ".gp")).string();
    paths.meta = (dir / (config.scan.stem + ".meta.txt")).string();
    const std::string stamp = timestamp_utc();
    write_csv_file(paths.csv, result, config, stamp);
    write_plot_file(paths.plot, result, config, csv_name, stamp);
    write_meta_file(paths.meta, result, config, stamp);
    return paths;
}

}  // namespace pbgsim
