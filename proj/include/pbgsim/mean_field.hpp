#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "pbgsim/model.hpp"

namespace pbgsim {

using Vector6c = Eigen::Matrix<Complex, 6, 1>;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;

// Classical envelope profiles on a z grid, one column per node.
struct MeanFieldSolution {
    std::vector<double> z;
    Eigen::Matrix<Complex, 6, Eigen::Dynamic> a;
    int newton_iterations = 0;
    int homotopy_stages = 0;       // 0 when plain Newton succeeded
    double final_residual = 0.0;   // scaled residual max-norm at acceptance

    int nodes() const { return static_cast<int>(z.size()); }
};

struct SolverOptions {
    int grid_points = 1001;
    double tolerance = 1e-10;      // on the scaled residual max-norm
    int max_iterations = 50;
    double min_damping = 1.0 / 1024.0;
    int max_homotopy_stages = 16;
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual_)
        : std::runtime_error(what), residual(residual_) {}
    double residual;
};

struct SingularJacobian : std::runtime_error {
    SingularJacobian(const std::string& what, double z_)
        : std::runtime_error(what), z(z_) {}
    double z;   // grid location of the pivot breakdown
};

struct SingularMatching : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> uniform_grid(double length, int points);

// Right-hand side of the six coupled envelope equations at position z.
// nl_scale multiplies the parametric couplings k_f/k_b (1 for the physical
// system; intermediate values are used by homotopy continuation).
Vector6c mean_field_rhs(const WaveguideParams& params, double z,
                        const Vector6c& a, double nl_scale = 1.0);

// Derivative blocks of the right-hand side: f's partials with respect to the
// amplitudes (d_lin) and their conjugates (d_conj), so that
// df = d_lin * da + d_conj * conj(da). These same blocks drive the
// fluctuation dynamics, which is the linearization of the envelope flow.
void coupling_blocks(const WaveguideParams& params, double z, const Vector6c& a,
                     double nl_scale, Matrix6c& d_lin, Matrix6c& d_conj);

// Closed-form solution with the parametric couplings switched off: each
// forward/backward pair evolves under its own Bragg coupling, with a
// cos/sin basis in Delta = sqrt(delta^2/4 - |K|^2) (principal branch; the
// band-gap regime makes Delta imaginary and the basis hyperbolic). Degenerate
// band edges |Delta| L < 1e-8 switch to the limiting {1, z} basis.
// Throws SingularMatching at resonant lengths where the boundary match for a
// pair becomes singular.
MeanFieldSolution linear_solution(const WaveguideParams& params,
                                  const BoundaryConditions& bc,
                                  const std::vector<double>& grid);

// Two-point boundary value solve on the given grid: box (implicit midpoint)
// finite differences, damped Newton on the banded system, seeded from
// linear_solution. Falls back to a flat boundary-extension seed and then to
// geometric homotopy continuation in the parametric couplings. The box scheme
// conserves the quadratic flux invariant to solver tolerance by construction.
MeanFieldSolution solve_bvp(const WaveguideParams& params,
                            const BoundaryConditions& bc,
                            const std::vector<double>& grid,
                            const SolverOptions& options = {});

MeanFieldSolution solve_bvp(const WaveguideParams& params,
                            const BoundaryConditions& bc,
                            const SolverOptions& options = {});

// Conserved flux |A_sF|^2+|A_iF|^2+2|A_pF|^2 - (backward counterpart),
// constant in z for any exact solution.
std::vector<double> flux_profile(const MeanFieldSolution& sol);
double flux_drift(const MeanFieldSolution& sol);

// Columns: z, Re/Im of the six amplitudes in mode order, flux.
void write_csv(const MeanFieldSolution& sol, std::ostream& out);

}  // namespace pbgsim
