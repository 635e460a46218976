#pragma once

#include <Eigen/Dense>
#include <array>

#include "bcq/types.hpp"

namespace bcq {

/// Adjoint eigenfunction of one spectral point, reconstructed from the
/// nullspace of the boundary matrix (Stokes branch) or in closed form
/// (Dirichlet branch), with its observation value xi'(L) and residual
/// diagnostics. Profiles are sampled on a uniform grid including endpoints
/// and normalized so max |xi| = 1.
struct AdjointEigenfunction {
    SpectralPoint point;

    /// Coefficients A1..A6 of xi on (e^{kx}, e^{-kx}, e^{mu1 x}, e^{-mu1 x},
    /// e^{mu2 x}, e^{-mu2 x}).
    std::array<Complex, 6> coeffs;
    std::array<Complex, 6> exponents;

    Eigen::VectorXd x2;         // sample grid, size N, x2[0] = 0, x2[N-1] = L
    Eigen::VectorXcd xi, xi_prime, psi1, psi2, q;

    Complex obs;        // xi'(L)
    double null_ratio;  // sigma_min / sigma_max of the scaled boundary matrix
    int null_dim;       // singular values below the nullspace threshold

    // Relative residuals (cancellation magnitude over term magnitude).
    double ode6_residual;
    double psi2_ode4_residual;
    double divergence_residual;
    std::array<double, 6> boundary_residuals;

    double max_boundary_residual() const;
};

AdjointEigenfunction solve_eigenfunction(const SpectralPoint& pt, const ChannelParams& p,
                                         const TolerancePolicy& tol, int grid_n = 1025);

/// Degenerate configuration sin(mu2_tilde L) = 0 on the Stokes branch, where
/// the boundary matrix acquires the spurious kernel xi ~ sin(mu2_tilde x)
/// whose reconstructed psi2 vanishes identically. Flagged points are excluded
/// from unique-continuation verdicts.
struct ResonanceDiagnostic {
    bool applicable = false;  // Stokes branch with purely imaginary mu2
    bool flagged = false;
    double mu2_tilde = 0.0;
    double sin_value = 0.0;  // sin(mu2_tilde L)
};

ResonanceDiagnostic sin_resonance_check(const SpectralPoint& pt, const ChannelParams& p,
                                        const TolerancePolicy& tol);

}  // namespace bcq
