#include "pbgsim/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace pbgsim {

namespace {

// Row-major so the generator's row updates run on contiguous memory.
using Basis = Eigen::Matrix<Complex, 12, 12, Eigen::RowMajor>;

// Cubic Lagrange stencil around one grid interval (shorter near the ends and
// on very coarse grids).
struct Stencil {
    int count = 0;
    double z[4];
    Vector6c value[4];

    Vector6c at(double zq) const {
        double w[4];
        for (int j = 0; j < count; ++j) {
            double p = 1.0;
            for (int m = 0; m < count; ++m) {
                if (m != j) p *= (zq - z[m]) / (z[j] - z[m]);
            }
            w[j] = p;
        }
        Vector6c v = w[0] * value[0];
        for (int j = 1; j < count; ++j) v += w[j] * value[j];
        return v;
    }
};

Stencil make_stencil(const MeanFieldSolution& sol, int interval) {
    const int nodes = sol.nodes();
    const int count = std::min(4, nodes);
    int first = std::clamp(interval - 1, 0, nodes - count);
    Stencil st;
    st.count = count;
    for (int j = 0; j < count; ++j) {
        st.z[j] = sol.z[first + j];
        st.value[j] = sol.a.col(first + j);
    }
    return st;
}

// d/dz of the stacked fluctuation basis: row 2j evolves with the coupling
// blocks, row 2j+1 with their conjugates, which keeps the conjugate-pair
// structure of the columns exact.
void apply_generator(const Matrix6c& d_lin, const Matrix6c& d_conj,
                     const Basis& y, Basis& out) {
    out.setZero();
    for (int j = 0; j < kModes; ++j) {
        for (int k = 0; k < kModes; ++k) {
            const Complex v = d_lin(j, k);
            const Complex w = d_conj(j, k);
            if (v != 0.0) {
                out.row(2 * j) += v * y.row(2 * k);
                out.row(2 * j + 1) += std::conj(v) * y.row(2 * k + 1);
            }
            if (w != 0.0) {
                out.row(2 * j) += w * y.row(2 * k + 1);
                out.row(2 * j + 1) += std::conj(w) * y.row(2 * k);
            }
        }
    }
}

// Uniform per-interval sub-step count from the coefficient frequency scale
// and the parametric gain over the propagation span. The fourth-order local
// error (omega h)^4/120 per unit phase is budgeted against the identity
// tolerance deflated by the squared gain, which is how truncation shows up
// in the scattering-map identity.
int substeps_per_interval(const WaveguideParams& params,
                          const MeanFieldSolution& sol, int k_begin, int k_end,
                          const FluctuationOptions& options) {
    const double span = sol.z[k_end] - sol.z[k_begin];
    double h_max = 0.0;
    for (int k = k_begin; k < k_end; ++k) {
        h_max = std::max(h_max, sol.z[k + 1] - sol.z[k]);
    }
    const auto block = sol.a.middleCols(k_begin, k_end - k_begin + 1);
    const double a_scale = block.cwiseAbs().maxCoeff();
    const double ap_f = block.row(pF).cwiseAbs().maxCoeff();
    const double ap_b = block.row(pB).cwiseAbs().maxCoeff();

    const double pair_rate =
        std::max({std::abs(params.delta_s) + std::abs(params.k_s),
                  std::abs(params.delta_i) + std::abs(params.k_i),
                  std::abs(params.delta_p) + std::abs(params.k_p)});
    const double omega = pair_rate + std::abs(params.delta_f) +
                         std::abs(params.delta_b) +
                         2.0 * (std::abs(params.k_f) + std::abs(params.k_b)) * a_scale;

    const double gain = 2.0 * std::max(std::abs(params.k_f) * ap_f,
                                       std::abs(params.k_b) * ap_b);
    const double amp2 = std::exp(2.0 * std::min(gain * span, 30.0));
    const double tau = std::max(options.tolerance / (2.0 * std::max(amp2, 1.0)),
                                1e-14);
    const double theta_max =
        std::pow(120.0 * tau / std::max(omega * span, 1.0), 0.25);

    int n = 1;
    if (omega > 0.0 && h_max > 0.0) {
        n = static_cast<int>(std::ceil(h_max * omega / theta_max));
        n = std::clamp(n, 1, options.max_substeps);
    }
    return options.doubled_substeps ? 2 * n : n;
}

}  // namespace

Matrix12c propagate_basis(const WaveguideParams& params,
                          const MeanFieldSolution& sol, int k_begin, int k_end,
                          const FluctuationOptions& options) {
    validate(params);
    if (k_begin < 0 || k_end <= k_begin || k_end >= sol.nodes()) {
        throw std::invalid_argument("propagation range must select an increasing "
                                    "slice of the grid");
    }
    const int nsub = substeps_per_interval(params, sol, k_begin, k_end, options);

    Basis y = Basis::Identity();
    Basis k1, k2, k3, k4, work;
    Matrix6c d_lin, d_conj;

    for (int k = k_begin; k < k_end; ++k) {
        const Stencil st = make_stencil(sol, k);
        const double z0 = sol.z[k];
        const double h = (sol.z[k + 1] - sol.z[k]) / nsub;
        for (int s = 0; s < nsub; ++s) {
            const double za = z0 + s * h;
            const double zm = za + 0.5 * h;
            const double zb = za + h;

            coupling_blocks(params, za, st.at(za), 1.0, d_lin, d_conj);
            apply_generator(d_lin, d_conj, y, k1);

            coupling_blocks(params, zm, st.at(zm), 1.0, d_lin, d_conj);
            work = y + (0.5 * h) * k1;
            apply_generator(d_lin, d_conj, work, k2);
            work = y + (0.5 * h) * k2;
            apply_generator(d_lin, d_conj, work, k3);

            coupling_blocks(params, zb, st.at(zb), 1.0, d_lin, d_conj);
            work = y + h * k3;
            apply_generator(d_lin, d_conj, work, k4);

            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return Matrix12c(y);
}

Matrix12c propagate_basis(const WaveguideParams& params,
                          const MeanFieldSolution& sol,
                          const FluctuationOptions& options) {
    return propagate_basis(params, sol, 0, sol.nodes() - 1, options);
}

Matrix12c to_input_output(const Matrix12c& transfer) {
    // In a deep band gap the transfer blocks grow like e^{kappa*L} while the
    // scattering entries stay O(1), so the block algebra cancels up to ~16
    // digits of intermediate magnitude. Extended precision keeps the loss
    // below the identity checks' tolerance.
    using LComplex = std::complex<long double>;
    using LMatrix6 = Eigen::Matrix<LComplex, 6, 6>;
    const LMatrix6 a = transfer.topLeftCorner<6, 6>().cast<LComplex>();
    const LMatrix6 b = transfer.topRightCorner<6, 6>().cast<LComplex>();
    const LMatrix6 c = transfer.bottomLeftCorner<6, 6>().cast<LComplex>();
    const LMatrix6 d = transfer.bottomRightCorner<6, 6>().cast<LComplex>();

    const Eigen::PartialPivLU<LMatrix6> lu(d);
    const double rc = static_cast<double>(lu.rcond());
    if (!(rc > 1e-13)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "backward transfer block is numerically singular "
                      "(rcond=%.2e)", rc);
        throw BlockInversionError(buf, rc);
    }
    const LMatrix6 d_inv = lu.solve(LMatrix6::Identity());
    const LMatrix6 d_inv_c = lu.solve(c);

    Matrix12c u;
    u.topLeftCorner<6, 6>() = (a - b * d_inv_c).cast<Complex>();
    u.topRightCorner<6, 6>() = (b * d_inv).cast<Complex>();
    u.bottomLeftCorner<6, 6>() = (-d_inv_c).cast<Complex>();
    u.bottomRightCorner<6, 6>() = d_inv.cast<Complex>();
    return u;
}

Matrix12c compose_scattering(const Matrix12c& s1, const Matrix12c& s2) {
    const Eigen::Matrix<Complex, 6, 6> a1 = s1.topLeftCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> b1 = s1.topRightCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> c1 = s1.bottomLeftCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> d1 = s1.bottomRightCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> a2 = s2.topLeftCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> b2 = s2.topRightCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> c2 = s2.bottomLeftCorner<6, 6>();
    const Eigen::Matrix<Complex, 6, 6> d2 = s2.bottomRightCorner<6, 6>();

    // Eliminate the interface fields: forward out of s1 feeds s2 and the
    // reflected return feeds back, so the loop operator is b1*c2.
    const Eigen::Matrix<Complex, 6, 6> loop =
        Eigen::Matrix<Complex, 6, 6>::Identity() - b1 * c2;
    const Eigen::PartialPivLU<Eigen::Matrix<Complex, 6, 6>> lu(loop);
    const double rc = lu.rcond();
    if (!(rc > 1e-13)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "scattering composition hits an internal resonance "
                      "(rcond=%.2e)", rc);
        throw BlockInversionError(buf, rc);
    }
    const Eigen::Matrix<Complex, 6, 6> g_a1 = lu.solve(a1);
    const Eigen::Matrix<Complex, 6, 6> g_b1_d2 = lu.solve(b1 * d2);

    Matrix12c s;
    s.topLeftCorner<6, 6>() = a2 * g_a1;
    s.topRightCorner<6, 6>() = b2 + a2 * g_b1_d2;
    s.bottomLeftCorner<6, 6>() = c1 + d1 * c2 * g_a1;
    s.bottomRightCorner<6, 6>() = d1 * (d2 + c2 * g_b1_d2);
    return s;
}

InputOutputResult input_output_matrix(const WaveguideParams& params,
                                      const MeanFieldSolution& sol,
                                      const FluctuationOptions& options) {
    // Caps each segment's transfer norm: large enough that ungapped devices
    // stay in one segment, small enough that converting a segment loses only
    // ~cap^2 * epsilon to cancellation.
    constexpr double kSegmentNormCap = 64.0;
    InputOutputResult r;
    r.u = Matrix12c::Identity();
    Matrix12c seg = Matrix12c::Identity();
    for (int k = 0; k + 1 < sol.nodes(); ++k) {
        seg = propagate_basis(params, sol, k, k + 1, options) * seg;
        const bool last = k + 2 == sol.nodes();
        if (last || seg.cwiseAbs().maxCoeff() > kSegmentNormCap) {
            r.prop_defect = std::max(r.prop_defect, propagation_identity_error(seg));
            r.u = compose_scattering(r.u, to_input_output(seg));
            seg = Matrix12c::Identity();
        }
    }
    return r;
}

namespace {

double signature_deviation(const Matrix12c& m, const Eigen::Matrix<double, 12, 1>& sig) {
    const Matrix12c lhs = m * sig.asDiagonal() * m.adjoint();
    Matrix12c dev = lhs;
    dev.diagonal() -= sig.cast<Complex>();
    return dev.cwiseAbs().maxCoeff();
}

}  // namespace

double verify_signature(const Matrix12c& u) {
    Eigen::Matrix<double, 12, 1> sig;
    for (int j = 0; j < kModes; ++j) {
        sig(2 * j) = 1.0;
        sig(2 * j + 1) = -1.0;
    }
    return signature_deviation(u, sig);
}

double propagation_identity_error(const Matrix12c& transfer) {
    Eigen::Matrix<double, 12, 1> sig;
    for (int j = 0; j < kModes; ++j) {
        const double s = is_forward(j) ? 1.0 : -1.0;
        sig(2 * j) = s;
        sig(2 * j + 1) = -s;
    }
    const double dev = signature_deviation(transfer, sig);
    const double scale = transfer.cwiseAbs().maxCoeff();
    return dev / std::max(1.0, scale * scale);
}

void write_csv(const Matrix12c& matrix, std::ostream& out) {
    char buf[40];
    for (int r = 0; r < 24; ++r) {
        for (int c = 0; c < 24; ++c) {
            const Complex v = matrix(r / 2, c / 2);
            double x;
            if (r % 2 == 0) {
                x = (c % 2 == 0) ? v.real() : -v.imag();
            } else {
                x = (c % 2 == 0) ? v.imag() : v.real();
            }
            std::snprintf(buf, sizeof(buf), c == 0 ? "%.17g" : ",%.17g", x);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace pbgsim
