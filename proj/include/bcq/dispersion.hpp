#pragma once

#include <cmath>
#include <vector>

#include "bcq/types.hpp"

namespace bcq {

/// Scaled hyperbolic weights e^{-|k|L} sinh(kL) and e^{-|k|L} cosh(kL).
/// Both stay in [-1, 1] for any k, L, so products with trigonometric factors
/// never overflow.
template <typename Scalar>
struct ScaledModeWeights {
    Scalar sinh_kL;  // e^{-|k|L} sinh(kL)
    Scalar cosh_kL;  // e^{-|k|L} cosh(kL)
    Scalar unit;     // e^{-|k|L}

    ScaledModeWeights(int k, Scalar L) {
        const Scalar akL = std::abs(Scalar(k)) * L;
        const Scalar e2 = std::exp(Scalar(-2) * akL);
        const Scalar sgn = (k >= 0) ? Scalar(1) : Scalar(-1);
        sinh_kL = sgn * (Scalar(1) - e2) / Scalar(2);
        cosh_kL = (Scalar(1) + e2) / Scalar(2);
        unit = std::exp(-akL);
    }
};

/// Stokes dispersion function for mode k, channel height L, evaluated at the
/// reduced root variable mu_tilde (lambda = -nu (k^2 + mu_tilde^2)):
///
///   D(mt) = -sinh(kL) sin(mt L) mt^2
///           + 2 k mt (1 - cosh(kL) cos(mt L))
///           + k^2 sinh(kL) sin(mt L).
///
/// The returned value is e^{-|k|L} D(mt): the k-hyperbolic factors are folded
/// into scaled weights so the evaluation stays finite for any |k|L. Zeros,
/// signs and the odd symmetry in mt are unchanged by the scaling. D does not
/// depend on the viscosity.
template <typename Scalar>
Scalar dispersion_value(int k, Scalar mu_tilde, Scalar L) {
    const ScaledModeWeights<Scalar> w(k, L);
    const Scalar kk = Scalar(k);
    const Scalar s = std::sin(mu_tilde * L);
    const Scalar c = std::cos(mu_tilde * L);
    return (kk * kk - mu_tilde * mu_tilde) * w.sinh_kL * s +
           Scalar(2) * kk * mu_tilde * (w.unit - w.cosh_kL * c);
}

/// One sample of the dispersion function.
struct DispersionSample {
    int k;
    double mu_tilde;
    double value;  // e^{-|k|L}-scaled dispersion value, always finite
};

/// Diagnostics gathered while bracketing dispersion roots.
struct RootScanDiagnostics {
    double search_ceiling = 0.0;  // largest mu_tilde examined

    /// Sign-change-free local dip of |D|: candidate even-order root. Bisection
    /// cannot see these, so they are surfaced instead of silently skipped.
    struct Suspect {
        double mu_lo;
        double mu_hi;
        double min_abs;
    };
    std::vector<Suspect> near_double_roots;

    /// Empirical interlacing check: roots found in (0, X] should number at
    /// least floor(X L / pi) - 2.
    bool count_growth_ok = true;
};

/// First `count` positive roots of the dispersion function (the spurious root
/// at mu_tilde = 0 is excluded), each bracketed by a sign change on a grid of
/// the given step and refined by bisection. Throws NumericError if the search
/// ceiling is reached before `count` sign changes are found.
std::vector<double> find_dispersion_roots(int k, double L, int count,
                                          const TolerancePolicy& tol,
                                          RootScanDiagnostics* diag = nullptr);

}  // namespace bcq
