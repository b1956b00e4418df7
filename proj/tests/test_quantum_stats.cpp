#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "pbgsim/quantum_stats.hpp"

using namespace pbgsim;

namespace {

Matrix12c two_mode_squeezer(double g) {
    // ideal squeezer on the forward signal/idler pair, everything else passes
    Matrix12c u = Matrix12c::Identity();
    const double ch = std::cosh(g), sh = std::sinh(g);
    u(0, 0) = ch;
    u(0, 3) = sh;
    u(1, 1) = ch;
    u(1, 2) = sh;
    u(2, 2) = ch;
    u(2, 1) = sh;
    u(3, 3) = ch;
    u(3, 0) = sh;
    return u;
}

OutputMoments through_identity(const InputState& in) {
    return output_moments(Matrix12c::Identity(), in);
}

}  // namespace

TEST_CASE("vacuum statistics through the identity channel") {
    const InputState in;
    const OutputMoments m = through_identity(in);
    for (int j = 0; j < kModes; ++j) {
        CHECK(m.b[j] == 0.0);
        CHECK(std::abs(m.c[j]) == 0.0);
        CHECK(squeeze_variance(m, j) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_FALSE(fano_factor(m, j).has_value());
        CHECK_FALSE(second_reduced_moment(m, j).has_value());
        CHECK_FALSE(moment_transfer(m, m, j).has_value());
    }
    CHECK(pair_squeeze_variance(m, sF, iF) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(pair_squeeze_variance(m, sF, iB) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("squeezed vacuum input reproduces its closed forms") {
    const double r = 0.7;
    for (double theta : {0.0, 1.1, 2.7}) {
        InputState in;
        in.modes[sF].r = r;
        in.modes[sF].theta = theta;
        const OutputMoments m = through_identity(in);
        CHECK(squeeze_variance(m, sF) == doctest::Approx(std::exp(-2.0 * r)).epsilon(1e-12));
        const double s2 = std::sinh(r) * std::sinh(r);
        const auto f = fano_factor(m, sF);
        REQUIRE(f.has_value());
        CHECK(*f == doctest::Approx(1.0 + std::cosh(2.0 * r)).epsilon(1e-12));
        const auto rw = second_reduced_moment(m, sF);
        REQUIRE(rw.has_value());
        CHECK(*rw == doctest::Approx(1.0 + std::cosh(2.0 * r) / s2).epsilon(1e-12));
    }
}

TEST_CASE("coherent light is poissonian with unit moment transfer") {
    InputState in;
    in.modes[iF].xi = Complex(2.0, 1.0);
    const OutputMoments m = through_identity(in);
    const auto f = fano_factor(m, iF);
    REQUIRE(f.has_value());
    CHECK(*f == doctest::Approx(1.0).epsilon(1e-14));
    const auto rw = second_reduced_moment(m, iF);
    REQUIRE(rw.has_value());
    CHECK(*rw == doctest::Approx(1.0).epsilon(1e-14));
    const auto tw = moment_transfer(m, input_moments(in), iF);
    REQUIRE(tw.has_value());
    CHECK(*tw == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("chaotic light doubles the reduced moment") {
    InputState in;
    in.modes[sB].n_ch = 3.0;
    const OutputMoments m = through_identity(in);
    CHECK(squeeze_variance(m, sB) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(*fano_factor(m, sB) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(*second_reduced_moment(m, sB) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("coherent plus chaotic mixture lands on exactly 1.75") {
    InputState in;
    in.modes[sF].xi = 10.0;
    in.modes[sF].n_ch = 100.0;
    const OutputMoments m = input_moments(in);
    CHECK(intensity_mean(m, sF) == 200.0);
    CHECK(intensity_covariance(m, sF, sF) == 30000.0);
    const auto rw = second_reduced_moment(m, sF);
    REQUIRE(rw.has_value());
    CHECK(*rw == 1.75);
    CHECK(*fano_factor(m, sF) == doctest::Approx(151.0).epsilon(1e-14));
    CHECK(squeeze_variance(m, sF) == doctest::Approx(201.0).epsilon(1e-14));
}

TEST_CASE("ideal two-mode squeezer statistics on vacuum") {
    const double g = 2.0;
    const Matrix12c u = two_mode_squeezer(g);
    const OutputMoments m = output_moments(u, InputState{});
    const double sh = std::sinh(g), ch = std::cosh(g);

    CHECK(m.b[sF] == doctest::Approx(sh * sh).epsilon(1e-12));          // ~13.1541
    CHECK(std::abs(m.c[sF]) < 1e-12);
    CHECK(std::abs(m.d(sF, iF)) == doctest::Approx(ch * sh).epsilon(1e-12));  // ~13.6462
    CHECK(std::norm(m.d(sF, iF)) == doctest::Approx(186.1849).epsilon(1e-4));
    CHECK(std::abs(m.d_bar(sF, iF)) < 1e-12);

    CHECK(pair_squeeze_variance(m, sF, iF) ==
          doctest::Approx(2.0 * std::exp(-2.0 * g)).epsilon(1e-10));
    CHECK(squeeze_variance(m, sF) == doctest::Approx(std::cosh(2.0 * g)).epsilon(1e-12));
    CHECK(*fano_factor(m, sF, iF) == doctest::Approx(1.0 + std::cosh(2.0 * g)).epsilon(1e-12));
    CHECK(*second_reduced_moment(m, sF) == doctest::Approx(2.0).epsilon(1e-12));
    // untouched backward modes keep vacuum statistics
    CHECK(m.b[sB] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_FALSE(fano_factor(m, pB).has_value());
}

TEST_CASE("displacement direction picks the squeezed or stretched variance") {
    const double r = 0.5, a = 3.0;
    const double s = std::sinh(r), c = std::cosh(r);
    const double mean = a * a + s * s;
    // theta = 0 squeezes the quadrature at angle pi/2, so an imaginary
    // displacement runs along the squeezed direction and a real one across it
    auto fano_for = [&](Complex xi) {
        InputState in;
        in.modes[pF].r = r;
        in.modes[pF].xi = xi;
        return *fano_factor(through_identity(in), pF);
    };
    const double quiet = (a * a * std::exp(-2.0 * r) + 2.0 * s * s * c * c) / mean;
    const double loud = (a * a * std::exp(2.0 * r) + 2.0 * s * s * c * c) / mean;
    CHECK(fano_for(Complex(0.0, a)) == doctest::Approx(quiet).epsilon(1e-12));
    CHECK(fano_for(Complex(a, 0.0)) == doctest::Approx(loud).epsilon(1e-12));
}

TEST_CASE("moment structure invariants hold along the physical pipeline") {
    struct Case {
        WaveguideParams p;
        BoundaryConditions bc;
    };
    std::vector<Case> cases;
    {
        Case c;  // undepleted amplifier
        c.p.k_f = 0.05;
        c.p.k_b = 0.05;
        c.p.length = 2.0;
        c.bc.a_pf0 = 10.0;
        cases.push_back(c);
    }
    {
        Case c;  // seeded conversion inside a pump gap
        c.p.k_f = 0.05;
        c.p.k_b = 0.05;
        c.p.k_p = 5.0;
        c.p.delta_p = 10.0;
        c.p.delta_f = 5.0;
        c.p.delta_b = 5.0;
        c.p.length = 2.0;
        c.bc.a_sf0 = 0.1;
        c.bc.a_if0 = 0.1;
        c.bc.a_pf0 = 10.0;
        cases.push_back(c);
    }
    {
        Case c;  // mixed corrugations, no conversion
        c.p.k_s = Complex(0.8, 0.3);
        c.p.k_i = 0.5;
        c.p.k_p = 1.2;
        c.p.delta_s = 1.0;
        c.p.delta_i = 2.5;
        c.p.length = 1.5;
        c.bc.a_sf0 = 1.0;
        c.bc.a_pbL = 0.4;
        cases.push_back(c);
    }

    InputState rich;
    rich.modes[sF].r = 0.4;
    rich.modes[sF].theta = 1.2;
    rich.modes[iF].n_ch = 2.5;
    rich.modes[pF].xi = Complex(1.0, -2.0);
    rich.modes[sB].r = 0.2;
    rich.modes[sB].n_ch = 1.0;
    rich.modes[sB].xi = Complex(0.0, 1.0);

    for (const Case& cs : cases) {
        SolverOptions opts;
        opts.grid_points = 2001;
        const MeanFieldSolution sol = solve_bvp(cs.p, cs.bc, opts);
        const Matrix12c u = input_output_matrix(cs.p, sol).u;
        for (const InputState& in : {InputState{}, rich}) {
            const OutputMoments m = output_moments(u, in);
            for (int j = 0; j < kModes; ++j) {
                CHECK(m.b[j] >= -1e-10);
                CHECK(std::abs(m.d(j, j) - m.c[j]) < 1e-12);
                CHECK(std::abs(m.d_bar(j, j) - Complex(-m.b[j])) < 1e-12);
                CHECK(squeeze_variance(m, j) >= -1e-9);
                for (int k = 0; k < kModes; ++k) {
                    CHECK(std::abs(m.d(j, k) - m.d(k, j)) < 1e-10);
                    CHECK(std::abs(m.d_bar(j, k) - std::conj(m.d_bar(k, j))) < 1e-10);
                    if (j != k) {
                        const double cap = std::min((m.b[j] + 1.0) * m.b[k],
                                                    m.b[j] * (m.b[k] + 1.0));
                        CHECK(std::norm(m.d(j, k)) <= cap + 1e-8);
                        CHECK(pair_squeeze_variance(m, j, k) >= -1e-9);
                    }
                }
            }
        }
        // identity map transfers every defined reduced moment at unit ratio
        const OutputMoments ref = input_moments(rich);
        for (int j = 0; j < kModes; ++j) {
            const auto tw = moment_transfer(ref, ref, j);
            if (tw.has_value()) CHECK(*tw == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
