#pragma once

#include <array>
#include <complex>
#include <string>

namespace pbgsim {

using Complex = std::complex<double>;

// Global mode order used everywhere: forward signal/idler/pump, then the
// backward triple. Stacked fluctuation vectors put (dA_j, dA_j^dag) of mode j
// in rows (2j, 2j+1), 0-based, so forward modes occupy rows 0..5 and backward
// modes rows 6..11.
enum Mode : int { sF = 0, iF = 1, pF = 2, sB = 3, iB = 4, pB = 5 };

inline constexpr int kModes = 6;
inline constexpr int kStacked = 2 * kModes;

const char* mode_label(int m);          // "s_F", "i_F", ...
const char* mode_key(int m);            // "sf", "if", ... (config/CSV keys)
int mode_from_key(const std::string& key);
inline bool is_forward(int m) { return m < 3; }

// Device parameters. Couplings k_s/k_i/k_p scatter a forward wave into its
// backward partner (Bragg corrugation); k_f/k_b drive the parametric
// down-conversion among the co-propagating triples. The delta_* are the
// corresponding phase mismatches per unit length; length is the device length.
struct WaveguideParams {
    Complex k_s{0.0}, k_i{0.0}, k_p{0.0};
    Complex k_f{0.0}, k_b{0.0};
    double delta_s = 0.0, delta_i = 0.0, delta_p = 0.0;
    double delta_f = 0.0, delta_b = 0.0;
    double length = 1.0;
};

// Two-point boundary data: forward amplitudes are fixed at z=0, backward
// amplitudes at z=L (counter-propagating geometry).
struct BoundaryConditions {
    Complex a_sf0{0.0}, a_if0{0.0}, a_pf0{0.0};   // forward inputs at z=0
    Complex a_sbL{0.0}, a_ibL{0.0}, a_pbL{0.0};   // backward inputs at z=L

    Complex forward_at_zero(int m) const;          // m in {sF,iF,pF}
    Complex backward_at_L(int m) const;            // m in {sB,iB,pB}
    // Input-side mean amplitude of a mode: z=0 for forward, z=L for backward.
    Complex input_amplitude(int m) const;
};

// Quantum state of one incident fluctuation mode: squeezed vacuum with
// parameter r and phase theta, plus n_ch chaotic photons, displaced by the
// coherent amplitude xi.
struct ModeInput {
    double r = 0.0;
    double theta = 0.0;
    double n_ch = 0.0;
    Complex xi{0.0};
};

struct InputState {
    std::array<ModeInput, kModes> modes{};
};

// Antinormally ordered second moments of the incident fluctuations,
// B = <dA dA^dag> = cosh^2 r + n_ch and C = <dA dA> = e^{i theta} sinh(2r)/2.
// Cross-mode moments vanish: incident fields are statistically independent.
struct AntiNormalInput {
    std::array<double, kModes> b{};
    std::array<Complex, kModes> c{};
};

AntiNormalInput input_anti_normal(const InputState& state);

// Validation: throws std::invalid_argument naming the offending field.
void validate(const WaveguideParams& params);
void validate(const InputState& state);
void validate(const WaveguideParams& params, const BoundaryConditions& bc);

}  // namespace pbgsim
