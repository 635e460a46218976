#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace bcq {

using Complex = std::complex<double>;

/// Configuration document or parameter validation failure. Maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric procedure could not meet its contract (bracketing grid exhausted,
/// eigensolver failure, cross-check disagreement). Maps to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical and geometric parameters of the periodic channel T x (0,L).
///
/// The separation |alpha - nu| > sep_tol is enforced at construction: when the
/// two coefficients collide, the characteristic roots mu1 and mu2 of the
/// adjoint ODE coincide and the exponential fundamental system degenerates.
struct ChannelParams {
    double nu;       // fluid viscosity, > 0
    double alpha;    // thermal diffusivity, > 0
    double L;        // channel height, > 0; x1 lives on the torus of length 2*pi
    double sep_tol;  // minimum allowed |alpha - nu|

    ChannelParams(double nu_, double alpha_, double L_, double sep_tol_ = 1e-8);
};

/// Nonzero Fourier mode in x1. The 0-mode is rejected everywhere except the
/// dedicated diagnostic path in the Galerkin module: its horizontal velocity
/// average obeys an autonomous uncontrolled heat equation.
struct ModeIndex {
    int k;
    explicit ModeIndex(int k_);
};

/// Numeric tolerances shared across the toolkit.
struct TolerancePolicy {
    double root_abs_tol = 1e-10;      // reported roots satisfy |f(root)| below this
    double residual_rel_tol = 1e-7;   // relative residual gate for eigenfunctions
    double svd_null_ratio = 1e-8;     // sigma_min/sigma_max acceptance for nullspaces
    double bracket_grid_step = 0.05;  // sampling step for sign-change bracketing

    void validate() const;
};

enum class Branch { Stokes, Dirichlet };

std::string to_string(Branch b);

/// One eigenvalue of the adjoint operator, with the derived characteristic
/// roots mu1 = sqrt(k^2 + lambda/nu) and mu2 = sqrt(k^2 + lambda/alpha)
/// (principal square root; when the radicand is negative the root is stored
/// as i*mu_tilde with mu_tilde >= 0 duplicated in the _tilde field).
struct SpectralPoint {
    Branch branch;
    int k;  // nonzero Fourier mode
    int j;  // 1-based index within (branch, k), ordered by decreasing lambda
    double lambda;
    Complex mu1;
    Complex mu2;
    std::optional<double> mu1_tilde;
    std::optional<double> mu2_tilde;
};

/// Derived characteristic root sqrt(k^2 + lambda/coef) as a (complex, tilde)
/// pair following the principal-branch convention above.
struct CharacteristicRoot {
    Complex mu;
    std::optional<double> tilde;
};

CharacteristicRoot characteristic_root(int k, double lambda, double coef);

}  // namespace bcq
