#pragma once

#include <Eigen/Dense>
#include <array>

#include "bcq/types.hpp"

namespace bcq {

/// Boundary matrix of the sixth-order adjoint ODE in the exponential basis
/// (e^{kx}, e^{-kx}, e^{mu1 x}, e^{-mu1 x}, e^{mu2 x}, e^{-mu2 x}).
///
/// Rows apply, in order: xi(0), xi(L), xi''(0), xi''(L), and the third-order
/// combination T = xi''' - mu2^2 xi' at 0 and at L. The last two columns
/// vanish in the T rows because T annihilates e^{+-mu2 x}.
///
/// Each column j is divided by scale[j] = e^{max(Re m_j, 0) L} so entries stay
/// O(poly(|m|)); the unscaled determinant is det(entries) * prod(scale).
struct BoundaryMatrix {
    int k;
    Complex mu1, mu2;
    double L;
    Eigen::Matrix<Complex, 6, 6> entries;
    std::array<Complex, 6> exponents;  // k, -k, mu1, -mu1, mu2, -mu2
    std::array<double, 6> scale;

    double scale_product() const {
        double s = 1.0;
        for (double v : scale) s *= v;
        return s;
    }
};

/// Root-separation guard shared by the boundary and multiplier matrices:
/// the exponential basis is a fundamental system only when mu1, mu2, k are
/// pairwise distinct up to sign.
void require_root_separation(int k, Complex mu1, Complex mu2, double sep_tol);

BoundaryMatrix build_M(int k, Complex mu1, Complex mu2, double L,
                       double sep_tol = 1e-8);

/// Determinant of the scaled entries (LU on the 6x6 block).
Complex det_scaled(const BoundaryMatrix& M);

/// Closed-form factorization of det M: two mu1/k exponential factors, the
/// square factors (mu2 -+ k)^2 (mu2 -+ mu1)^2, the factors (e^{mu2 L} -+ 1),
/// and the exponential prefactor e^{-L mu2 - L mu1 - k L}. Evaluated verbatim.
Complex det_factored(int k, Complex mu1, Complex mu2, double L);

/// Hadamard bound of the unscaled determinant; absolute comparisons of
/// near-zero determinants are made relative to this.
double det_magnitude_bound(const BoundaryMatrix& M);

}  // namespace bcq
