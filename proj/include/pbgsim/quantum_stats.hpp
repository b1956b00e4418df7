#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pbgsim/fluctuation.hpp"
#include "pbgsim/model.hpp"

namespace pbgsim {

// Gaussian moments of the output fields: b and c are the normally ordered
// single-mode fluctuation moments <db+ db> and <db db>, d and d_bar the
// cross-mode pair moments, xi the coherent amplitudes. The diagonal of d
// equals c and the diagonal of d_bar equals -b, so intensity statistics can
// be read uniformly from the pair moments.
struct OutputMoments {
    std::array<double, kModes> b;
    std::array<Complex, kModes> c;
    Eigen::Matrix<Complex, kModes, kModes> d;
    Eigen::Matrix<Complex, kModes, kModes> d_bar;
    std::array<Complex, kModes> xi;
};

// Pushes the input state through a scattering map.
OutputMoments output_moments(const Matrix12c& u, const InputState& in);

// Moments of the inputs themselves (identity map), the reference side for
// transfer ratios.
OutputMoments input_moments(const InputState& in);

// Principal squeeze variance of one mode; 1 on vacuum, e^{-2r} for an ideally
// squeezed input passed through an identity map.
double squeeze_variance(const OutputMoments& m, int j);

// Two-mode principal squeeze variance; 2 on vacuum.
double pair_squeeze_variance(const OutputMoments& m, int j, int k);

double intensity_mean(const OutputMoments& m, int j);
double intensity_covariance(const OutputMoments& m, int j, int k);

// Fano factor of the photocount in one mode or in the summed pair; empty when
// the mean intensity is numerically zero.
std::optional<double> fano_factor(const OutputMoments& m, int j);
std::optional<double> fano_factor(const OutputMoments& m, int j, int k);

// Second reduced intensity moment <W^2>/<W>^2; 1 + relative variance.
std::optional<double> second_reduced_moment(const OutputMoments& m, int j);

// Ratio of output to input second reduced moments.
std::optional<double> moment_transfer(const OutputMoments& out,
                                      const OutputMoments& in, int j);

}  // namespace pbgsim
