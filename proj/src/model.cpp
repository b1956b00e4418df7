#include "pbgsim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace pbgsim {

namespace {
constexpr const char* kLabels[kModes] = {"s_F", "i_F", "p_F", "s_B", "i_B", "p_B"};
constexpr const char* kKeys[kModes] = {"sf", "if", "pf", "sb", "ib", "pb"};
}  // namespace

const char* mode_label(int m) { return kLabels[m]; }
const char* mode_key(int m) { return kKeys[m]; }

int mode_from_key(const std::string& key) {
    for (int m = 0; m < kModes; ++m)
        if (key == kKeys[m]) return m;
    throw std::invalid_argument("unknown mode key '" + key + "'");
}

Complex BoundaryConditions::forward_at_zero(int m) const {
    switch (m) {
        case sF: return a_sf0;
        case iF: return a_if0;
        case pF: return a_pf0;
    }
    throw std::invalid_argument("forward_at_zero: not a forward mode");
}

Complex BoundaryConditions::backward_at_L(int m) const {
    switch (m) {
        case sB: return a_sbL;
        case iB: return a_ibL;
        case pB: return a_pbL;
    }
    throw std::invalid_argument("backward_at_L: not a backward mode");
}

Complex BoundaryConditions::input_amplitude(int m) const {
    return is_forward(m) ? forward_at_zero(m) : backward_at_L(m);
}

AntiNormalInput input_anti_normal(const InputState& state) {
    AntiNormalInput in;
    for (int m = 0; m < kModes; ++m) {
        const ModeInput& s = state.modes[m];
        in.b[m] = std::cosh(s.r) * std::cosh(s.r) + s.n_ch;
        in.c[m] = 0.5 * std::exp(Complex(0.0, s.theta)) * std::sinh(2.0 * s.r);
    }
    return in;
}

void validate(const WaveguideParams& params) {
    if (!(params.length > 0.0))
        throw std::invalid_argument("length must be positive");
    auto finite = [](const Complex& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    };
    if (!finite(params.k_s) || !finite(params.k_i) || !finite(params.k_p))
        throw std::invalid_argument("linear couplings k_s/k_i/k_p must be finite");
    if (!finite(params.k_f) || !finite(params.k_b))
        throw std::invalid_argument("nonlinear couplings k_f/k_b must be finite");
    for (double d : {params.delta_s, params.delta_i, params.delta_p,
                     params.delta_f, params.delta_b})
        if (!std::isfinite(d))
            throw std::invalid_argument("phase mismatches delta_* must be finite");
}

void validate(const InputState& state) {
    for (int m = 0; m < kModes; ++m) {
        const ModeInput& s = state.modes[m];
        if (s.r < 0.0 || !std::isfinite(s.r))
            throw std::invalid_argument(std::string("squeeze parameter r_") +
                                        mode_key(m) + " must be >= 0");
        if (s.n_ch < 0.0 || !std::isfinite(s.n_ch))
            throw std::invalid_argument(std::string("chaotic photon number n_ch_") +
                                        mode_key(m) + " must be >= 0");
        if (!std::isfinite(s.theta))
            throw std::invalid_argument(std::string("squeeze phase theta_") +
                                        mode_key(m) + " must be finite");
        if (!std::isfinite(s.xi.real()) || !std::isfinite(s.xi.imag()))
            throw std::invalid_argument(std::string("coherent amplitude xi_") +
                                        mode_key(m) + " must be finite");
    }
}

void validate(const WaveguideParams& params, const BoundaryConditions& bc) {
    validate(params);
    const Complex vals[kModes] = {bc.a_sf0, bc.a_if0, bc.a_pf0,
                                  bc.a_sbL, bc.a_ibL, bc.a_pbL};
    const char* names[kModes] = {"a_sf0", "a_if0", "a_pf0",
                                 "a_sbL", "a_ibL", "a_pbL"};
    for (int m = 0; m < kModes; ++m)
        if (!std::isfinite(vals[m].real()) || !std::isfinite(vals[m].imag()))
            throw std::invalid_argument(std::string("boundary amplitude ") +
                                        names[m] + " must be finite");
}

}  // namespace pbgsim
