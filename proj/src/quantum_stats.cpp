#include "pbgsim/quantum_stats.hpp"

#include <cmath>

namespace pbgsim {

namespace {

// Below this mean intensity the ratio-type observables are reported as
// undefined rather than amplified roundoff.
constexpr double kIntensityFloor = 1e-12;

}  // namespace

OutputMoments output_moments(const Matrix12c& u, const InputState& in) {
    validate(in);
    const AntiNormalInput an = input_anti_normal(in);

    OutputMoments m;
    Eigen::Matrix<Complex, 12, 1> xi_stacked;
    for (int k = 0; k < kModes; ++k) {
        xi_stacked(2 * k) = in.modes[k].xi;
        xi_stacked(2 * k + 1) = std::conj(in.modes[k].xi);
    }
    const Eigen::Matrix<Complex, 12, 1> xi_out = u * xi_stacked;

    for (int j = 0; j < kModes; ++j) {
        m.xi[j] = xi_out(2 * j);
        double bj = 0.0;
        Complex cj = 0.0;
        for (int k = 0; k < kModes; ++k) {
            const Complex a = u(2 * j, 2 * k);
            const Complex g = u(2 * j, 2 * k + 1);
            bj += 2.0 * std::real(std::conj(a) * g * std::conj(an.c[k])) +
                  std::norm(a) * (an.b[k] - 1.0) + std::norm(g) * an.b[k];
            cj += a * a * an.c[k] + g * g * std::conj(an.c[k]) +
                  a * g * (2.0 * an.b[k] - 1.0);
        }
        m.b[j] = bj;
        m.c[j] = cj;
    }

    for (int j = 0; j < kModes; ++j) {
        for (int k = 0; k < kModes; ++k) {
            Complex d = 0.0;
            Complex d_bar = 0.0;
            for (int l = 0; l < kModes; ++l) {
                const Complex aj = u(2 * j, 2 * l);
                const Complex gj = u(2 * j, 2 * l + 1);
                const Complex ak = u(2 * k, 2 * l);
                const Complex gk = u(2 * k, 2 * l + 1);
                d += aj * ak * an.c[l] + gj * gk * std::conj(an.c[l]) +
                     aj * gk * an.b[l] + gj * ak * (an.b[l] - 1.0);
                d_bar += -std::conj(gj) * ak * an.c[l] -
                         std::conj(aj) * gk * std::conj(an.c[l]) -
                         std::conj(aj) * ak * (an.b[l] - 1.0) -
                         std::conj(gj) * gk * an.b[l];
            }
            m.d(j, k) = d;
            m.d_bar(j, k) = d_bar;
        }
    }
    return m;
}

OutputMoments input_moments(const InputState& in) {
    return output_moments(Matrix12c::Identity(), in);
}

double squeeze_variance(const OutputMoments& m, int j) {
    return 1.0 + 2.0 * (m.b[j] - std::abs(m.c[j]));
}

double pair_squeeze_variance(const OutputMoments& m, int j, int k) {
    return 2.0 * (1.0 + m.b[j] + m.b[k] - 2.0 * std::real(m.d_bar(j, k)) -
                  std::abs(m.c[j] + m.c[k] + 2.0 * m.d(j, k)));
}

double intensity_mean(const OutputMoments& m, int j) {
    return m.b[j] + std::norm(m.xi[j]);
}

double intensity_covariance(const OutputMoments& m, int j, int k) {
    return std::norm(m.d(j, k)) + std::norm(m.d_bar(j, k)) +
           2.0 * std::real(m.d(j, k) * std::conj(m.xi[j]) * std::conj(m.xi[k])) -
           2.0 * std::real(m.d_bar(j, k) * m.xi[j] * std::conj(m.xi[k]));
}

std::optional<double> fano_factor(const OutputMoments& m, int j) {
    const double mean = intensity_mean(m, j);
    if (mean < kIntensityFloor) return std::nullopt;
    return 1.0 + intensity_covariance(m, j, j) / mean;
}

std::optional<double> fano_factor(const OutputMoments& m, int j, int k) {
    const double mean = intensity_mean(m, j) + intensity_mean(m, k);
    if (mean < kIntensityFloor) return std::nullopt;
    const double var = intensity_covariance(m, j, j) +
                       intensity_covariance(m, k, k) +
                       2.0 * intensity_covariance(m, j, k);
    return 1.0 + var / mean;
}

std::optional<double> second_reduced_moment(const OutputMoments& m, int j) {
    const double mean = intensity_mean(m, j);
    if (mean < kIntensityFloor) return std::nullopt;
    return 1.0 + intensity_covariance(m, j, j) / (mean * mean);
}

std::optional<double> moment_transfer(const OutputMoments& out,
                                      const OutputMoments& in, int j) {
    const std::optional<double> r_out = second_reduced_moment(out, j);
    const std::optional<double> r_in = second_reduced_moment(in, j);
    if (!r_out || !r_in || *r_in == 0.0) return std::nullopt;
    return *r_out / *r_in;
}

}  // namespace pbgsim
