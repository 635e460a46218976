#include <doctest.h>

#include <cmath>

#include "bcq/fd_oracle.hpp"
#include "bcq/prng.hpp"
#include "bcq/spectra.hpp"

using namespace bcq;

namespace {
const ChannelParams kRef(1.0, 0.4, M_PI);
const TolerancePolicy kTol;

// First positive dispersion roots for k = 1, L = pi, located by sign-change
// bisection and cross-checked against the clamped finite-difference pencil.
const double kRootsK1[5] = {1.682230892624226, 2.760526133330817, 3.851161765243604,
                            4.859487626942483, 5.901853861194068};
}  // namespace

TEST_CASE("dispersion vanishes at mu_tilde = 0 for any k, L") {
    for (int k : {1, -1, 2, 5, -7})
        for (double L : {0.5, 1.0, M_PI, 6.0})
            CHECK(dispersion_value(k, 0.0, L) == 0.0);
}

TEST_CASE("dispersion is odd in mu_tilde") {
    SplitMix64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const int k = (rng.uniform01() < 0.5 ? 1 : -1) * rng.uniform_int(1, 6);
        const double L = rng.uniform(0.5, 2 * M_PI);
        const double m = rng.uniform(0.0, 12.0);
        const double plus = dispersion_value(k, m, L);
        const double minus = dispersion_value(k, -m, L);
        CHECK(std::abs(plus + minus) <= 1e-14 * std::max(1.0, std::abs(plus)));
    }
}

TEST_CASE("dispersion stays finite for large |k| L") {
    const double v = dispersion_value(500, 3.7, 2 * M_PI);
    CHECK(std::isfinite(v));
    const double w = dispersion_value(-2000, 11.0, 5.0);
    CHECK(std::isfinite(w));
}

TEST_CASE("first dispersion root located by the FD oracle, confirmed by bisection") {
    // Independent location: the discrete Stokes pencil at N = 2000.
    FdStokesResult fd = fd_stokes_oracle(1, kRef, 2000, 1);
    const double mu_fd = std::sqrt(-fd.lambdas[0] / kRef.nu - 1.0);

    // Sign-change bracket around the oracle value, then bisection on D.
    double a = mu_fd - 0.05, b = mu_fd + 0.05;
    double fa = dispersion_value(1, a, M_PI);
    REQUIRE(fa * dispersion_value(1, b, M_PI) < 0.0);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = dispersion_value(1, m, M_PI);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    const double root = 0.5 * (a + b);
    CHECK(std::abs(dispersion_value(1, root, M_PI)) < kTol.root_abs_tol);
    CHECK(std::abs(root - mu_fd) < 1e-4);          // oracle agreement
    CHECK(root == doctest::Approx(kRootsK1[0]).epsilon(1e-12));
}

TEST_CASE("stokes eigenvalues: frozen roots, ordering, strict bound") {
    auto pts = stokes_eigenvalues(ModeIndex(1), kRef, 5, kTol);
    REQUIRE(pts.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(*pts[i].mu1_tilde == doctest::Approx(kRootsK1[i]).epsilon(1e-12));
        CHECK(pts[i].lambda ==
              doctest::Approx(-(1.0 + kRootsK1[i] * kRootsK1[i])).epsilon(1e-12));
        CHECK(pts[i].lambda < -kRef.nu * 1.0 - kTol.root_abs_tol);
        CHECK(pts[i].j == i + 1);
        CHECK(pts[i].mu1.real() == 0.0);  // purely imaginary on the Stokes branch
        if (i > 0) CHECK(pts[i].lambda < pts[i - 1].lambda);
    }
    // alpha = 0.4 < nu: mu2 purely imaginary too.
    for (const auto& pt : pts) CHECK(pt.mu2_tilde.has_value());
}

TEST_CASE("opposite modes share the same Stokes roots") {
    auto plus = stokes_eigenvalues(ModeIndex(3), kRef, 4, kTol);
    auto minus = stokes_eigenvalues(ModeIndex(-3), kRef, 4, kTol);
    for (int i = 0; i < 4; ++i) {
        CHECK(*plus[i].mu1_tilde == *minus[i].mu1_tilde);
        CHECK(plus[i].lambda == minus[i].lambda);
    }
}

TEST_CASE("root lists are nu-invariant and lambda scales linearly in nu") {
    ChannelParams p_half(0.5, 0.2, M_PI), p_two(2.0, 0.8, M_PI);
    auto a = stokes_eigenvalues(ModeIndex(2), p_half, 5, kTol);
    auto b = stokes_eigenvalues(ModeIndex(2), p_two, 5, kTol);
    for (int i = 0; i < 5; ++i) {
        CHECK(*a[i].mu1_tilde == *b[i].mu1_tilde);  // identical bits: nu never enters
        CHECK(std::abs(b[i].lambda - 4.0 * a[i].lambda) <= 1e-12 * std::abs(b[i].lambda));
    }
}

TEST_CASE("dirichlet eigenvalues are the closed form") {
    // -alpha (k^2 + j^2 pi^2 / L^2), direct substitutions.
    ChannelParams p1(2.0, 1.0, M_PI);
    auto d1 = dirichlet_eigenvalues(ModeIndex(1), p1, 1);
    CHECK(d1[0].lambda == doctest::Approx(-2.0).epsilon(1e-15));

    ChannelParams p2(1.0, 0.5, M_PI);
    auto d2 = dirichlet_eigenvalues(ModeIndex(2), p2, 3);
    CHECK(d2[2].lambda == doctest::Approx(-6.5).epsilon(1e-15));

    ChannelParams p3(1.0, 0.4, 1.0);
    auto d3 = dirichlet_eigenvalues(ModeIndex(1), p3, 1);
    CHECK(d3[0].lambda == doctest::Approx(-0.4 * (1.0 + M_PI * M_PI)).epsilon(1e-15));

    auto d = dirichlet_eigenvalues(ModeIndex(3), kRef, 6);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].lambda < d[i - 1].lambda);
    for (const auto& pt : d) {
        CHECK(pt.mu2_tilde.has_value());
        CHECK(*pt.mu2_tilde == doctest::Approx(pt.j * M_PI / kRef.L).epsilon(1e-15));
    }
}

TEST_CASE("fd oracle cross-validates the dispersion route") {
    auto pts = stokes_eigenvalues(ModeIndex(1), kRef, 5, kTol);
    FdStokesResult fd = fd_stokes_oracle(1, kRef, 2000, 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(pts[i].lambda - fd.lambdas[i]) <=
              1e-3 * std::abs(pts[i].lambda));
        // Pencil residual: limited by the h^-4 stiffness roundoff floor.
        CHECK(fd.residuals[i] < 5e-5);
    }
}

TEST_CASE("fd oracle refines at second order") {
    FdStokesResult f500 = fd_stokes_oracle(1, kRef, 500, 5);
    FdStokesResult f1000 = fd_stokes_oracle(1, kRef, 1000, 5);
    FdStokesResult f2000 = fd_stokes_oracle(1, kRef, 2000, 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(f1000.lambdas[i] - f2000.lambdas[i]) <=
              1e-4 * std::abs(f2000.lambdas[i]));
        if (i == 0) continue;  // first eigenvalue: discretization error is already
                               // below the Ritz roundoff floor at these N
        const double ratio = (f500.lambdas[i] - f1000.lambdas[i]) /
                             (f1000.lambdas[i] - f2000.lambdas[i]);
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
    CHECK_THROWS_AS(fd_stokes_oracle(1, kRef, 100, 3), ConfigError);
}

TEST_CASE("merged spectrum is sorted with both branches present") {
    MergedSpectrum m = merge_spectrum(ModeIndex(1), kRef, 5, 5, kTol);
    REQUIRE(m.points.size() == 10);
    CHECK(m.coincidences.empty());
    bool has_s = false, has_d = false;
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        if (i > 0) CHECK(m.points[i].lambda <= m.points[i - 1].lambda);
        has_s |= m.points[i].branch == Branch::Stokes;
        has_d |= m.points[i].branch == Branch::Dirichlet;
    }
    CHECK(has_s);
    CHECK(has_d);
}

TEST_CASE("cross-branch eigenvalue coincidences are flagged") {
    // Placing alpha = |lambda_S1| / (1 + 4) makes the Dirichlet j = 2 value
    // collide with the first Stokes eigenvalue.
    auto s = stokes_eigenvalues(ModeIndex(1), kRef, 1, kTol);
    const double alpha_star = -s[0].lambda / 5.0;
    ChannelParams p(1.0, alpha_star, M_PI);
    MergedSpectrum m = merge_spectrum(ModeIndex(1), p, 1, 2, kTol);
    REQUIRE(m.coincidences.size() == 1);
    const auto [i, j] = m.coincidences[0];
    CHECK(m.points[i].branch != m.points[j].branch);
}

TEST_CASE("root count growth matches the interlacing estimate") {
    for (int k : {1, 2}) {
        for (double L : {1.0, M_PI, 2 * M_PI}) {
            ChannelParams p(1.0, 0.4, L);
            RootScanDiagnostics diag;
            auto pts = stokes_eigenvalues(ModeIndex(k), p, 20, kTol, &diag);
            CHECK(pts.size() == 20);
            CHECK(diag.count_growth_ok);
            CHECK(diag.near_double_roots.empty());
        }
    }
}

TEST_CASE("pathological grid step exhausts the sample budget") {
    TolerancePolicy tol;
    tol.bracket_grid_step = 1e-9;
    CHECK_THROWS_AS(find_dispersion_roots(1, M_PI, 1, tol), NumericError);
}
