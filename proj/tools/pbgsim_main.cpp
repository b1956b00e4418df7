#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pbgsim/config.hpp"
#include "pbgsim/figures.hpp"
#include "pbgsim/scan.hpp"

namespace {

int run_and_write(const pbgsim::Config& config) {
    const pbgsim::ScanResult result = pbgsim::run_scan(config);
    const pbgsim::ScanOutputPaths paths = pbgsim::write_scan_outputs(config, result);
    int ok = 0;
    for (const pbgsim::ScanPoint& p : result.points) ok += p.status == 0;
    std::printf("%zu points, %d converged, %d workers\n", result.points.size(), ok,
                std::min<int>(pbgsim::worker_count(), static_cast<int>(result.points.size())));
    std::printf("wrote %s\n", paths.csv.c_str());
    std::printf("wrote %s\n", paths.plot.c_str());
    std::printf("wrote %s\n", paths.meta.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // One BLAS thread per worker keeps parallel and serial sweeps bitwise
    // reproducible; respect an explicit user setting.
    setenv("OPENBLAS_NUM_THREADS", "1", 0);

    CLI::App app{"nonclassical light in a parametric band-gap waveguide"};
    app.require_subcommand(1);

    std::string run_path;
    CLI::App* cmd_run = app.add_subcommand("run", "sweep the scan described by a config file");
    cmd_run->add_option("config", run_path, "configuration file")->required();

    int figure_id = 0;
    std::string out_dir;
    CLI::App* cmd_fig = app.add_subcommand("figure", "run a preset scan (ids 2..12)");
    cmd_fig->add_option("id", figure_id, "preset scan id")->required();
    cmd_fig->add_option("--out", out_dir, "output directory (default: current)");

    std::string check_path;
    CLI::App* cmd_val = app.add_subcommand("validate", "check a config file and echo its resolved form");
    cmd_val->add_option("config", check_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (cmd_run->parsed()) return run_and_write(pbgsim::load_config_file(run_path));
        if (cmd_fig->parsed()) {
            pbgsim::Config config = pbgsim::figure_recipe(figure_id);
            if (!out_dir.empty()) config.scan.output_dir = out_dir;
            return run_and_write(config);
        }
        const pbgsim::Config config = pbgsim::load_config_file(check_path);
        pbgsim::validate(config);
        std::cout << pbgsim::serialize_config(config);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
