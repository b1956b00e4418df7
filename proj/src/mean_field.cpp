#include "pbgsim/mean_field.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace pbgsim {

namespace {

constexpr Complex kImag{0.0, 1.0};

// Below this magnitude a Bragg coupling is treated as absent; the analytic
// pair solution divides by K, so exact zeros need their own branch.
constexpr double kCouplingFloor = 1e-150;

double max_abs(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double scaled_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& x) {
    return max_abs(r) / std::max(1.0, max_abs(x));
}

Vector6c node_amplitudes(const Eigen::VectorXd& x, int node) {
    Vector6c a;
    for (int m = 0; m < kModes; ++m) {
        a(m) = Complex(x(12 * node + 2 * m), x(12 * node + 2 * m + 1));
    }
    return a;
}

void set_node_amplitudes(Eigen::VectorXd& x, int node, const Vector6c& a) {
    for (int m = 0; m < kModes; ++m) {
        x(12 * node + 2 * m) = a(m).real();
        x(12 * node + 2 * m + 1) = a(m).imag();
    }
}

// Forward/backward basis pair for one Bragg-coupled mode at position z.
// Columns are the two independent solutions, rows are (forward, backward).
struct PairBasis {
    Complex f1, f2, b1, b2;
};

PairBasis pair_basis(Complex k, double delta, Complex big_delta, bool degenerate,
                     double z) {
    const Complex ef = std::exp(-kImag * (0.5 * delta * z));
    const Complex eb = std::exp(kImag * (0.5 * delta * z));
    PairBasis basis;
    if (degenerate) {
        basis.f1 = ef;
        basis.f2 = ef * z;
        basis.b1 = eb * (-delta / (2.0 * k));
        basis.b2 = eb * (-delta * z / (2.0 * k) - kImag / k);
        return basis;
    }
    const Complex c = std::cos(big_delta * z);
    const Complex s = std::sin(big_delta * z);
    basis.f1 = ef * c;
    basis.f2 = ef * s;
    basis.b1 = eb * (-delta / (2.0 * k) * c + kImag * big_delta / k * s);
    basis.b2 = eb * (-delta / (2.0 * k) * s - kImag * big_delta / k * c);
    return basis;
}

struct Workspace {
    explicit Workspace(int n)
        : ab(static_cast<size_t>(kLdab) * n, 0.0),
          ipiv(n),
          r(n),
          r_trial(n),
          x_trial(n),
          rhs(n) {}

    static constexpr int kl = 17;
    static constexpr int ku = 17;
    static constexpr int kLdab = 2 * kl + ku + 1;

    std::vector<double> ab;
    std::vector<lapack_int> ipiv;
    Eigen::VectorXd r;
    Eigen::VectorXd r_trial;
    Eigen::VectorXd x_trial;
    Eigen::VectorXd rhs;
};

void compute_residual(const WaveguideParams& params, const BoundaryConditions& bc,
                      const std::vector<double>& grid, double nl_scale,
                      const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const int nodes = static_cast<int>(grid.size());
    const int n = 12 * nodes;
    for (int m = 0; m < 3; ++m) {
        const Complex target = bc.forward_at_zero(m);
        r(2 * m) = x(2 * m) - target.real();
        r(2 * m + 1) = x(2 * m + 1) - target.imag();
    }
    for (int k = 0; k + 1 < nodes; ++k) {
        const double h = grid[k + 1] - grid[k];
        const double zm = 0.5 * (grid[k] + grid[k + 1]);
        const Vector6c yk = node_amplitudes(x, k);
        const Vector6c yk1 = node_amplitudes(x, k + 1);
        const Vector6c f = mean_field_rhs(params, zm, 0.5 * (yk + yk1), nl_scale);
        const int rb = 6 + 12 * k;
        for (int m = 0; m < kModes; ++m) {
            const Complex rc = (yk1(m) - yk(m)) / h - f(m);
            r(rb + 2 * m) = rc.real();
            r(rb + 2 * m + 1) = rc.imag();
        }
    }
    for (int m = 3; m < kModes; ++m) {
        const Complex target = bc.backward_at_L(m);
        const int base = 12 * (nodes - 1) + 2 * m;
        const int row = n - 6 + 2 * (m - 3);
        r(row) = x(base) - target.real();
        r(row + 1) = x(base + 1) - target.imag();
    }
}

void assemble_jacobian(const WaveguideParams& params, const std::vector<double>& grid,
                       double nl_scale, const Eigen::VectorXd& x, Workspace& ws) {
    const int nodes = static_cast<int>(grid.size());
    const int n = 12 * nodes;
    std::fill(ws.ab.begin(), ws.ab.end(), 0.0);
    auto at = [&ws](int i, int j) -> double& {
        return ws.ab[static_cast<size_t>(j) * Workspace::kLdab +
                     (Workspace::kl + Workspace::ku + i - j)];
    };

    for (int c = 0; c < 6; ++c) at(c, c) = 1.0;
    for (int c = 0; c < 6; ++c) at(n - 6 + c, 12 * (nodes - 1) + 6 + c) = 1.0;

    Matrix6c d_lin, d_conj;
    for (int k = 0; k + 1 < nodes; ++k) {
        const double h = grid[k + 1] - grid[k];
        const double zm = 0.5 * (grid[k] + grid[k + 1]);
        const Vector6c ym =
            0.5 * (node_amplitudes(x, k) + node_amplitudes(x, k + 1));
        coupling_blocks(params, zm, ym, nl_scale, d_lin, d_conj);
        const int rb = 6 + 12 * k;
        for (int j = 0; j < 12; ++j) {
            at(rb + j, 12 * k + j) += -1.0 / h;
            at(rb + j, 12 * (k + 1) + j) += 1.0 / h;
        }
        for (int rm = 0; rm < kModes; ++rm) {
            for (int cm = 0; cm < kModes; ++cm) {
                const Complex v = d_lin(rm, cm);
                const Complex w = d_conj(rm, cm);
                if (v == 0.0 && w == 0.0) continue;
                // Real 2x2 image of -(v d + w conj(d))/2, split over the two
                // nodes flanking the midpoint.
                const double rr = -0.5 * (v.real() + w.real());
                const double ri = -0.5 * (-v.imag() + w.imag());
                const double ir = -0.5 * (v.imag() + w.imag());
                const double ii = -0.5 * (v.real() - w.real());
                for (int side = 0; side < 2; ++side) {
                    const int cb = 12 * (k + side) + 2 * cm;
                    at(rb + 2 * rm, cb) += rr;
                    at(rb + 2 * rm, cb + 1) += ri;
                    at(rb + 2 * rm + 1, cb) += ir;
                    at(rb + 2 * rm + 1, cb + 1) += ii;
                }
            }
        }
    }
}

enum class NewtonStatus { converged, stalled, singular };

struct NewtonOutcome {
    NewtonStatus status = NewtonStatus::stalled;
    int iterations = 0;
    double residual = 0.0;
    double singular_z = 0.0;
};

double pivot_location(const std::vector<double>& grid, int row) {
    const int nodes = static_cast<int>(grid.size());
    if (row < 6) return grid.front();
    if (row >= 12 * nodes - 6) return grid.back();
    const int k = std::min((row - 6) / 12, nodes - 2);
    return 0.5 * (grid[k] + grid[k + 1]);
}

NewtonOutcome newton_solve(const WaveguideParams& params, const BoundaryConditions& bc,
                           const std::vector<double>& grid, double nl_scale,
                           const SolverOptions& options, Eigen::VectorXd& x,
                           Workspace& ws) {
    const int n = static_cast<int>(x.size());
    NewtonOutcome out;
    compute_residual(params, bc, grid, nl_scale, x, ws.r);
    double rn = scaled_norm(ws.r, x);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (rn <= options.tolerance) {
            out.status = NewtonStatus::converged;
            out.iterations = iter;
            out.residual = rn;
            return out;
        }
        assemble_jacobian(params, grid, nl_scale, x, ws);
        ws.rhs = -ws.r;
        const lapack_int info = LAPACKE_dgbsv(
            LAPACK_COL_MAJOR, n, Workspace::kl, Workspace::ku, 1, ws.ab.data(),
            Workspace::kLdab, ws.ipiv.data(), ws.rhs.data(), n);
        if (info > 0) {
            out.status = NewtonStatus::singular;
            out.iterations = iter;
            out.residual = rn;
            out.singular_z = pivot_location(grid, static_cast<int>(info) - 1);
            return out;
        }
        if (info < 0) {
            throw std::logic_error("banded solve rejected argument " +
                                   std::to_string(-info));
        }
        bool accepted = false;
        for (double alpha = 1.0; alpha >= options.min_damping; alpha *= 0.5) {
            ws.x_trial = x + alpha * ws.rhs;
            compute_residual(params, bc, grid, nl_scale, ws.x_trial, ws.r_trial);
            const double rn_trial = scaled_norm(ws.r_trial, ws.x_trial);
            if (rn_trial <= options.tolerance ||
                rn_trial <= rn * (1.0 - 1e-4 * alpha)) {
                x.swap(ws.x_trial);
                ws.r.swap(ws.r_trial);
                rn = rn_trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.status = NewtonStatus::stalled;
            out.iterations = iter + 1;
            out.residual = rn;
            return out;
        }
    }
    out.status = rn <= options.tolerance ? NewtonStatus::converged
                                         : NewtonStatus::stalled;
    out.iterations = options.max_iterations;
    out.residual = rn;
    return out;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) {
        throw std::invalid_argument("grid needs at least two nodes");
    }
    for (size_t k = 0; k + 1 < grid.size(); ++k) {
        if (!(grid[k + 1] > grid[k])) {
            throw std::invalid_argument("grid must be strictly increasing");
        }
    }
}

Eigen::VectorXd flat_seed(const BoundaryConditions& bc, int nodes) {
    Eigen::VectorXd x(12 * nodes);
    Vector6c a;
    for (int m = 0; m < 3; ++m) a(m) = bc.forward_at_zero(m);
    for (int m = 3; m < kModes; ++m) a(m) = bc.backward_at_L(m);
    for (int k = 0; k < nodes; ++k) set_node_amplitudes(x, k, a);
    return x;
}

}  // namespace

std::vector<double> uniform_grid(double length, int points) {
    if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
    if (points < 2) throw std::invalid_argument("grid needs at least two nodes");
    std::vector<double> z(points);
    for (int k = 0; k < points; ++k) {
        z[k] = length * static_cast<double>(k) / (points - 1);
    }
    z.back() = length;
    return z;
}

Vector6c mean_field_rhs(const WaveguideParams& params, double z, const Vector6c& a,
                        double nl_scale) {
    const Complex es = std::exp(-kImag * (params.delta_s * z));
    const Complex ei = std::exp(-kImag * (params.delta_i * z));
    const Complex ep = std::exp(-kImag * (params.delta_p * z));
    const Complex ef = std::exp(kImag * (params.delta_f * z));
    const Complex eb = std::exp(-kImag * (params.delta_b * z));
    const Complex kf = nl_scale * params.k_f;
    const Complex kb = nl_scale * params.k_b;

    Vector6c f;
    f(sF) = kImag * params.k_s * es * a(sB) + 2.0 * kf * ef * a(pF) * std::conj(a(iF));
    f(iF) = kImag * params.k_i * ei * a(iB) + 2.0 * kf * ef * a(pF) * std::conj(a(sF));
    f(pF) = kImag * params.k_p * ep * a(pB) -
            2.0 * std::conj(kf) * std::conj(ef) * a(sF) * a(iF);
    f(sB) = -kImag * std::conj(params.k_s) * std::conj(es) * a(sF) -
            2.0 * kb * eb * a(pB) * std::conj(a(iB));
    f(iB) = -kImag * std::conj(params.k_i) * std::conj(ei) * a(iF) -
            2.0 * kb * eb * a(pB) * std::conj(a(sB));
    f(pB) = -kImag * std::conj(params.k_p) * std::conj(ep) * a(pF) +
            2.0 * std::conj(kb) * std::conj(eb) * a(sB) * a(iB);
    return f;
}

void coupling_blocks(const WaveguideParams& params, double z, const Vector6c& a,
                     double nl_scale, Matrix6c& d_lin, Matrix6c& d_conj) {
    const Complex es = std::exp(-kImag * (params.delta_s * z));
    const Complex ei = std::exp(-kImag * (params.delta_i * z));
    const Complex ep = std::exp(-kImag * (params.delta_p * z));
    const Complex ef = std::exp(kImag * (params.delta_f * z));
    const Complex eb = std::exp(-kImag * (params.delta_b * z));
    const Complex gf = 2.0 * nl_scale * params.k_f * ef;
    const Complex gb = 2.0 * nl_scale * params.k_b * eb;

    d_lin.setZero();
    d_conj.setZero();

    d_lin(sF, sB) = kImag * params.k_s * es;
    d_lin(sF, pF) = gf * std::conj(a(iF));
    d_conj(sF, iF) = gf * a(pF);

    d_lin(iF, iB) = kImag * params.k_i * ei;
    d_lin(iF, pF) = gf * std::conj(a(sF));
    d_conj(iF, sF) = gf * a(pF);

    d_lin(pF, pB) = kImag * params.k_p * ep;
    d_lin(pF, sF) = -std::conj(gf) * a(iF);
    d_lin(pF, iF) = -std::conj(gf) * a(sF);

    d_lin(sB, sF) = -kImag * std::conj(params.k_s) * std::conj(es);
    d_lin(sB, pB) = -gb * std::conj(a(iB));
    d_conj(sB, iB) = -gb * a(pB);

    d_lin(iB, iF) = -kImag * std::conj(params.k_i) * std::conj(ei);
    d_lin(iB, pB) = -gb * std::conj(a(sB));
    d_conj(iB, sB) = -gb * a(pB);

    d_lin(pB, pF) = -kImag * std::conj(params.k_p) * std::conj(ep);
    d_lin(pB, sB) = std::conj(gb) * a(iB);
    d_lin(pB, iB) = std::conj(gb) * a(sB);
}

MeanFieldSolution linear_solution(const WaveguideParams& params,
                                  const BoundaryConditions& bc,
                                  const std::vector<double>& grid) {
    validate(params, bc);
    check_grid(grid);
    const int nodes = static_cast<int>(grid.size());
    const double z0 = grid.front();
    const double zl = grid.back();

    MeanFieldSolution sol;
    sol.z = grid;
    sol.a.resize(kModes, nodes);

    const std::array<std::pair<Complex, double>, 3> pairs = {
        {{params.k_s, params.delta_s},
         {params.k_i, params.delta_i},
         {params.k_p, params.delta_p}}};
    static constexpr const char* kPairNames[3] = {"signal", "idler", "pump"};

    for (int p = 0; p < 3; ++p) {
        const auto [k, delta] = pairs[p];
        const Complex f0 = bc.forward_at_zero(p);
        const Complex bl = bc.backward_at_L(p + 3);
        if (std::abs(k) < kCouplingFloor) {
            for (int n = 0; n < nodes; ++n) {
                sol.a(p, n) = f0;
                sol.a(p + 3, n) = bl;
            }
            continue;
        }
        const Complex big_delta =
            std::sqrt(Complex(0.25 * delta * delta - std::norm(k), 0.0));
        const bool degenerate = std::abs(big_delta) * (zl - z0) < 1e-8;

        const PairBasis top = pair_basis(k, delta, big_delta, degenerate, z0);
        const PairBasis bot = pair_basis(k, delta, big_delta, degenerate, zl);
        // Match (c1, c2) to the forward value at the near end and the
        // backward value at the far end.
        const Complex det = top.f1 * bot.b2 - top.f2 * bot.b1;
        const double det_scale =
            std::abs(top.f1 * bot.b2) + std::abs(top.f2 * bot.b1);
        if (std::abs(det) <= 1e-12 * det_scale) {
            throw SingularMatching(std::string("linear boundary match is singular for the ") +
                                   kPairNames[p] + " pair at this length");
        }
        const Complex c1 = (f0 * bot.b2 - top.f2 * bl) / det;
        const Complex c2 = (top.f1 * bl - bot.b1 * f0) / det;

        for (int n = 0; n < nodes; ++n) {
            const PairBasis b = pair_basis(k, delta, big_delta, degenerate, grid[n]);
            sol.a(p, n) = c1 * b.f1 + c2 * b.f2;
            sol.a(p + 3, n) = c1 * b.b1 + c2 * b.b2;
        }
    }
    return sol;
}

MeanFieldSolution solve_bvp(const WaveguideParams& params,
                            const BoundaryConditions& bc,
                            const std::vector<double>& grid,
                            const SolverOptions& options) {
    validate(params, bc);
    check_grid(grid);
    const int nodes = static_cast<int>(grid.size());
    const int n = 12 * nodes;
    Workspace ws(n);

    Eigen::VectorXd linear_seed;
    try {
        const MeanFieldSolution lin = linear_solution(params, bc, grid);
        linear_seed.resize(n);
        for (int k = 0; k < nodes; ++k) {
            set_node_amplitudes(linear_seed, k, lin.a.col(k));
        }
    } catch (const SingularMatching&) {
        // fall through to the flat seed
    }

    Eigen::VectorXd x;
    int total_iterations = 0;
    NewtonOutcome out;

    auto finish = [&](int homotopy_stages) {
        MeanFieldSolution sol;
        sol.z = grid;
        sol.a.resize(kModes, nodes);
        for (int k = 0; k < nodes; ++k) sol.a.col(k) = node_amplitudes(x, k);
        sol.newton_iterations = total_iterations;
        sol.homotopy_stages = homotopy_stages;
        sol.final_residual = out.residual;
        return sol;
    };

    if (linear_seed.size() > 0) {
        x = linear_seed;
        out = newton_solve(params, bc, grid, 1.0, options, x, ws);
        total_iterations += out.iterations;
        if (out.status == NewtonStatus::converged) return finish(0);
    }

    x = flat_seed(bc, nodes);
    out = newton_solve(params, bc, grid, 1.0, options, x, ws);
    total_iterations += out.iterations;
    if (out.status == NewtonStatus::converged) return finish(0);

    // Continuation in the parametric coupling strength, doubling from a
    // nearly linear system up to the physical one.
    x = linear_seed.size() > 0 ? linear_seed : flat_seed(bc, nodes);
    int stages = 0;
    for (int e = options.max_homotopy_stages - 1; e >= 0; --e) {
        const double t = std::ldexp(1.0, -e);
        out = newton_solve(params, bc, grid, t, options, x, ws);
        total_iterations += out.iterations;
        ++stages;
        if (out.status != NewtonStatus::converged) {
            char buf[160];
            if (out.status == NewtonStatus::singular) {
                std::snprintf(buf, sizeof(buf),
                              "mean-field Newton hit a singular pivot near z=%g "
                              "(continuation stage %d of %d)",
                              out.singular_z, stages, options.max_homotopy_stages);
                throw SingularJacobian(buf, out.singular_z);
            }
            std::snprintf(buf, sizeof(buf),
                          "mean-field Newton stalled at residual %.3e "
                          "(continuation stage %d of %d)",
                          out.residual, stages, options.max_homotopy_stages);
            throw ConvergenceError(buf, out.residual);
        }
    }
    return finish(stages);
}

MeanFieldSolution solve_bvp(const WaveguideParams& params,
                            const BoundaryConditions& bc,
                            const SolverOptions& options) {
    return solve_bvp(params, bc, uniform_grid(params.length, options.grid_points),
                     options);
}

std::vector<double> flux_profile(const MeanFieldSolution& sol) {
    static constexpr double kWeights[kModes] = {1.0, 1.0, 2.0, -1.0, -1.0, -2.0};
    std::vector<double> flux(sol.z.size());
    for (size_t k = 0; k < sol.z.size(); ++k) {
        double f = 0.0;
        for (int m = 0; m < kModes; ++m) {
            f += kWeights[m] * std::norm(sol.a(m, static_cast<int>(k)));
        }
        flux[k] = f;
    }
    return flux;
}

double flux_drift(const MeanFieldSolution& sol) {
    const std::vector<double> flux = flux_profile(sol);
    const double ref = flux.front();
    double drift = 0.0;
    for (double f : flux) drift = std::max(drift, std::abs(f - ref));
    return drift / std::max(1.0, std::abs(ref));
}

void write_csv(const MeanFieldSolution& sol, std::ostream& out) {
    out << "z";
    for (int m = 0; m < kModes; ++m) {
        out << ",re_a_" << mode_key(m) << ",im_a_" << mode_key(m);
    }
    out << ",flux\n";
    const std::vector<double> flux = flux_profile(sol);
    char buf[64];
    for (size_t k = 0; k < sol.z.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.12g", sol.z[k]);
        out << buf;
        for (int m = 0; m < kModes; ++m) {
            const Complex a = sol.a(m, static_cast<int>(k));
            std::snprintf(buf, sizeof(buf), ",%.12g,%.12g", a.real(), a.imag());
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.12g\n", flux[k]);
        out << buf;
    }
}

}  // namespace pbgsim
