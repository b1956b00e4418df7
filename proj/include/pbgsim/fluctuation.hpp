#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "pbgsim/mean_field.hpp"
#include "pbgsim/model.hpp"

namespace pbgsim {

// Fluctuation vectors stack the six modes in mode order with two rows per
// mode: row 2j carries the fluctuation operator of mode j, row 2j+1 its
// conjugate partner. Forward modes occupy rows 0..5, backward modes 6..11.
using Matrix12c = Eigen::Matrix<Complex, 12, 12>;

struct FluctuationOptions {
    double tolerance = 1e-8;   // error budget for the output-map identity
    int max_substeps = 64;     // per grid interval
    bool doubled_substeps = false;  // refinement runs for convergence checks
};

struct BlockInversionError : std::runtime_error {
    BlockInversionError(const std::string& what, double rcond_)
        : std::runtime_error(what), rcond(rcond_) {}
    double rcond;
};

// Transfer matrix of the linearized dynamics along the mean field: maps the
// stacked fluctuation vector at grid[k_begin] to grid[k_end]. Fourth-order
// Runge-Kutta with deterministic sub-stepping sized from the coefficient
// frequencies and the parametric gain; mean-field values between nodes come
// from cubic interpolation.
Matrix12c propagate_basis(const WaveguideParams& params,
                          const MeanFieldSolution& sol, int k_begin, int k_end,
                          const FluctuationOptions& options = {});

Matrix12c propagate_basis(const WaveguideParams& params,
                          const MeanFieldSolution& sol,
                          const FluctuationOptions& options = {});

// Rearranges the transfer matrix into the physical scattering map from input
// fluctuations (forward at z=0, backward at z=L) to output fluctuations
// (forward at z=L, backward at z=0) by inverting the backward-backward block.
// Throws BlockInversionError when that block is numerically singular.
Matrix12c to_input_output(const Matrix12c& transfer);

// Scattering maps of two adjacent stretches combined into one (Redheffer
// composition). s1 must cover the stretch nearer z=0. Throws
// BlockInversionError at an internal resonance, where the composition has no
// bounded solution.
Matrix12c compose_scattering(const Matrix12c& s1, const Matrix12c& s2);

struct InputOutputResult {
    Matrix12c u;
    // largest per-segment transfer identity deviation, the propagation
    // accuracy diagnostic
    double prop_defect = 0.0;
};

// Full-device scattering map. Deep in a band gap the end-to-end transfer
// matrix overflows the representable dynamic range of the conversion (its
// norm grows like e^{kappa L} while scattering entries stay O(1)), so the
// propagation is cut into segments of bounded transfer norm that are
// converted individually and composed as scattering maps.
InputOutputResult input_output_matrix(const WaveguideParams& params,
                                      const MeanFieldSolution& sol,
                                      const FluctuationOptions& options = {});

// Max-norm deviation of U S U^dag - S with the bosonic signature
// S = diag(+1,-1) per mode; zero for an exact scattering map, and the
// primary precision control on the fluctuation pipeline.
double verify_signature(const Matrix12c& u);

// The transfer matrix preserves a different signature, with the backward
// blocks flipped by the reversed propagation direction. Returned relative to
// the squared matrix scale, since band-gap transfer matrices grow
// exponentially large while the identity deviation grows with the square of
// that scale.
double propagation_identity_error(const Matrix12c& transfer);

// 24x24 real form, each complex entry as a 2x2 rotation-style block.
void write_csv(const Matrix12c& matrix, std::ostream& out);

}  // namespace pbgsim
