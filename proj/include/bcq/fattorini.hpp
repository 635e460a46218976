#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bcq/eigenfunction.hpp"
#include "bcq/types.hpp"

namespace bcq {

/// Multiplier matrix R mapping sinh-basis coefficients (A, B, C) of
/// f = A sinh(kx) + B sinh(mu1 x) + C sinh(mu2 x) to (f'(0), f(L), f'(L)).
struct MultiplierMatrix {
    int k;
    Complex mu1, mu2;
    double L;
    Eigen::Matrix3cd entries;
};

MultiplierMatrix build_R(int k, Complex mu1, Complex mu2, double L,
                         double sep_tol = 1e-8);

Complex det_R(const MultiplierMatrix& R);

/// |det R| divided by the product of row 2-norms, so the verdict threshold is
/// scale-free.
double normalized_det_R(const MultiplierMatrix& R);

/// Normalized |det R| below this is treated as numerically singular when
/// issuing verdicts.
inline constexpr double kDetRThreshold = 1e-8;

/// Multiplier determinant in the regime where both characteristic roots are
/// purely imaginary (mu = i mu_tilde):
///
///   F(mt2) = [cos(mt2 L)(k sin(mt1 L) - sinh(kL) mt1)
///             + sinh(kL) mt1 cos(mt1 L) - k cosh(kL) sin(mt1 L)] mt2
///            + mt1 sin(mt2 L) k cosh(kL) - mt1 cos(mt1 L) sin(mt2 L) k.
///
/// Satisfies det R = -F under the substitution (each of the two imaginary
/// columns of R contributes a factor i).
double F_value(int k, double mu1_tilde, double mu2_tilde, double L);

/// Zeros of alpha -> F_lambda(mu2_tilde(alpha)) on a compact subinterval of
/// (0, nu), for the j-th Stokes eigenvalue of mode k. Their union over (k, j)
/// approximates the exceptional set of diffusion coefficients.
struct AlphaScanReport {
    int k, j;
    double nu, L;
    double lambda;  // the (alpha-independent) Stokes eigenvalue scanned
    double alpha_lo, alpha_hi, grid_step;

    struct Zero {
        double alpha;
        double f_residual;  // |F| after bisection
    };
    std::vector<Zero> zeros;

    /// min |F| over grid points at least two steps away from every zero.
    double verdict_margin = 0.0;
};

AlphaScanReport scan_alpha(ModeIndex k, int j, double nu, double L, double alpha_lo,
                           double alpha_hi, double grid_step, const TolerancePolicy& tol);

enum class Verdict { observable, not_observable, inconclusive };

std::string to_string(Verdict v);

/// Unique-continuation verdict for one eigenvalue, with both routes attached:
/// the multiplier determinant and the directly computed observation xi'(L).
struct VerdictReport {
    SpectralPoint point;
    Verdict verdict = Verdict::inconclusive;
    double det_r_normalized = 0.0;  // NaN on the Dirichlet branch
    double obs_abs = 0.0;           // |xi'(L)|
    double null_ratio = 0.0;
    bool resonance_flagged = false;
    bool outside_certified_regime = false;  // alpha > nu: general complex det R
    bool routes_consistent = true;      // det-R route agrees with the observation
    std::string note;
};

VerdictReport uc_verdict(const SpectralPoint& pt, const ChannelParams& p,
                         const TolerancePolicy& tol);

/// Integration-by-parts identity for the sixth-order form: the interior
/// bilinear integral (composite Simpson, quad_n odd) must equal the boundary
/// concomitant evaluated from analytic derivatives. Returns the relative
/// defect. f = A sinh(kx) + B sinh(mu1 x) + C sinh(mu2 x).
double ibp_boundary_identity(const AdjointEigenfunction& ef, const ChannelParams& p,
                             Complex A, Complex B, Complex C, int quad_n = 4097);

/// Two-control variant: with controls on both the temperature and the normal
/// velocity at the upper wall, the multiplier f = sinh(kx) - (k/mu1) sinh(mu1 x)
/// has f'(0) = 0 and f'(L) != 0 whenever mu1 != +-k, independent of alpha.
struct TwoControlReport {
    Verdict verdict = Verdict::inconclusive;
    double f_prime_0_abs = 0.0;
    double f_prime_L_abs = 0.0;
};

TwoControlReport two_control_verdict(const SpectralPoint& pt, const ChannelParams& p,
                                     const TolerancePolicy& tol);

}  // namespace bcq
