#include "pbgsim/figures.hpp"

#include <cstdio>
#include <stdexcept>

namespace pbgsim {

namespace {

ScanAxis axis(const std::string& path, double start, double stop, int count) {
    ScanAxis a;
    a.terms.push_back({path, 1.0});
    a.start = start;
    a.stop = stop;
    a.count = count;
    return a;
}

// Shared device: weak Bragg reflection of the pump interacting with
// parametric conversion of strength 5e-2 over a length-2 guide. Individual
// recipes switch on signal/idler reflection and detunings as needed.
Config device_base() {
    Config c;
    c.device.k_f = 5e-2;
    c.device.k_b = 5e-2;
    c.device.length = 2.0;
    c.boundary.a_pf0 = 10.0;
    return c;
}

// Squeezing maps: classical signal/idler seeds, vacuum fluctuation inputs.
Config squeeze_base() {
    Config c = device_base();
    c.boundary.a_sf0 = 0.1;
    c.boundary.a_if0 = 0.1;
    return c;
}

// Photon-statistics maps: pump-only mean field, coherent fluctuation seeds
// of opposite sign on the forward signal and idler.
Config photon_base() {
    Config c = device_base();
    c.input.modes[sF].xi = -10.0;
    c.input.modes[iF].xi = 10.0;
    return c;
}

}  // namespace

const std::vector<int>& figure_ids() {
    static const std::vector<int> ids = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    return ids;
}

Config figure_recipe(int id) {
    Config c;
    switch (id) {
        case 2:
            // Backward-pair squeezing vs pump drive and pump reflection.
            c = squeeze_base();
            c.scan.axis1 = axis("boundary.a_pf0.re", 0.0, 10.0, 61);
            c.scan.axis2 = axis("device.k_p.re", 0.0, 5.0, 61);
            c.scan.observables = {"lambda_sb_ib"};
            break;
        case 3:
            // Forward-pair squeezing vs pump reflection detuning.
            c = squeeze_base();
            c.device.k_p = 5.0;
            c.scan.axis1 = axis("device.delta_p", 0.0, 30.0, 101);
            c.scan.observables = {"lambda_sf_if"};
            c.solver.grid_points = 2001;
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 4:
            // Forward-pair squeezing over the pump (coupling, detuning) plane
            // with detuned conversion.
            c = squeeze_base();
            c.device.delta_f = 5.0;
            c.device.delta_b = 5.0;
            c.scan.axis1 = axis("device.k_p.re", 0.0, 6.0, 61);
            c.scan.axis2 = axis("device.delta_p", 0.0, 25.0, 61);
            c.scan.observables = {"lambda_sf_if"};
            c.solver.grid_points = 2001;
            break;
        case 5:
            // Squeezing of the forward pair and of the cross pair over the
            // signal/idler detuning plane, all reflections on.
            c = squeeze_base();
            c.device.k_s = 5.0;
            c.device.k_i = 5.0;
            c.device.k_p = 5.0;
            c.scan.axis1 = axis("device.delta_s", 0.0, 25.0, 41);
            c.scan.axis2 = axis("device.delta_i", 0.0, 25.0, 41);
            c.scan.observables = {"lambda_sf_if", "lambda_sf_ib"};
            c.solver.grid_points = 2001;
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 6:
            // Pair Fano factor vs pump drive.
            c = photon_base();
            c.scan.axis1 = axis("boundary.a_pf0.re", 0.0, 20.0, 101);
            c.scan.observables = {"fano_sf_if"};
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 7:
            // Pair Fano factor vs pump reflection strength.
            c = photon_base();
            c.scan.axis1 = axis("device.k_p.re", 0.0, 3.0, 101);
            c.scan.observables = {"fano_sf_if"};
            break;
        case 8:
            // Pair Fano factor vs seed magnitude (opposite-sign seeds moved
            // together) at fixed pump reflection.
            c = photon_base();
            c.device.k_p = 1.4;
            {
                ScanAxis a;
                a.terms.push_back({"input_state.xi_sf.re", -1.0});
                a.terms.push_back({"input_state.xi_if.re", 1.0});
                a.start = 0.0;
                a.stop = 20.0;
                a.count = 101;
                c.scan.axis1 = a;
            }
            c.scan.observables = {"fano_sf_if"};
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 9:
            // Pair Fano factor over the pump (coupling, detuning) plane for a
            // shorter guide with detuned conversion.
            c = photon_base();
            c.device.length = 1.0;
            c.device.delta_f = 5.0;
            c.device.delta_b = 5.0;
            c.scan.axis1 = axis("device.k_p.re", 0.0, 8.0, 41);
            c.scan.axis2 = axis("device.delta_p", 0.0, 20.0, 41);
            c.scan.observables = {"fano_sf_if"};
            c.solver.grid_points = 2001;
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 10:
            // Pair Fano factor over the signal/idler reflection plane.
            c = photon_base();
            c.device.k_p = 1.4;
            c.scan.axis1 = axis("device.k_s.re", 0.0, 2.0, 41);
            c.scan.axis2 = axis("device.k_i.re", 0.0, 2.0, 41);
            c.scan.observables = {"fano_sf_if"};
            c.solver.fluct_tolerance = 1e-6;
            break;
        case 11:
            // Second reduced moment of the signal (and its transfer ratio)
            // over the pump (coupling, detuning) plane for a chaotic-plus-
            // coherent signal input.
            c = photon_base();
            c.device.delta_f = 5.0;
            c.device.delta_b = 5.0;
            c.input.modes[sF].xi = 10.0;
            c.input.modes[sF].n_ch = 100.0;
            c.scan.axis1 = axis("device.k_p.re", 0.0, 10.0, 61);
            c.scan.axis2 = axis("device.delta_p", 0.0, 30.0, 61);
            c.scan.observables = {"rw_sf", "tw_sf"};
            c.solver.grid_points = 2001;
            break;
        case 12:
            // Signal moment-transfer ratio vs pump drive and chaotic input
            // occupation, deep in the pump band gap.
            c = photon_base();
            c.device.k_p = 8.0;
            c.device.delta_p = 20.0;
            c.device.delta_f = 5.0;
            c.device.delta_b = 5.0;
            c.input.modes[sF].xi = 10.0;
            c.scan.axis1 = axis("boundary.a_pf0.re", 0.0, 20.0, 41);
            c.scan.axis2 = axis("input_state.n_ch_sf", 0.0, 300.0, 41);
            c.scan.observables = {"tw_sf"};
            c.solver.grid_points = 2001;
            c.solver.fluct_tolerance = 1e-6;
            break;
        default:
            throw std::invalid_argument("figure id must be between 2 and 12");
    }
    char stem[16];
    std::snprintf(stem, sizeof stem, "fig%02d", id);
    c.scan.stem = stem;
    return c;
}

}  // namespace pbgsim
