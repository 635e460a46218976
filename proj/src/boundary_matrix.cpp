#include "bcq/boundary_matrix.hpp"

#include <cmath>

namespace bcq {

void require_root_separation(int k, Complex mu1, Complex mu2, double sep_tol) {
    const Complex ck(static_cast<double>(k), 0.0);
    const double scale = std::max({1.0, std::abs(ck), std::abs(mu1), std::abs(mu2)});
    auto close = [&](Complex a, Complex b) { return std::abs(a - b) <= sep_tol * scale; };
    if (close(mu1, ck) || close(mu1, -ck) || close(mu2, ck) || close(mu2, -ck) ||
        close(mu2, mu1) || close(mu2, -mu1))
        throw NumericError("degenerate root separation: k, mu1, mu2 must be pairwise "
                           "distinct up to sign");
}

BoundaryMatrix build_M(int k, Complex mu1, Complex mu2, double L, double sep_tol) {
    require_root_separation(k, mu1, mu2, sep_tol);
    BoundaryMatrix M;
    M.k = k;
    M.mu1 = mu1;
    M.mu2 = mu2;
    M.L = L;
    const Complex ck(static_cast<double>(k), 0.0);
    M.exponents = {ck, -ck, mu1, -mu1, mu2, -mu2};

    const Complex mu2sq = mu2 * mu2;
    for (int j = 0; j < 6; ++j) {
        const Complex m = M.exponents[j];
        const double c = std::max(m.real(), 0.0) * L;  // divided-out log-scale
        M.scale[j] = std::exp(c);
        const Complex e0 = std::exp(Complex(-c, 0.0));       // e^{m*0} / scale
        const Complex eL = std::exp(m * L - Complex(c, 0.0));  // e^{m*L} / scale
        const Complex t = m * m * m - mu2sq * m;  // xi''' - mu2^2 xi' on e^{mx}
        M.entries(0, j) = e0;
        M.entries(1, j) = eL;
        M.entries(2, j) = m * m * e0;
        M.entries(3, j) = m * m * eL;
        M.entries(4, j) = t * e0;
        M.entries(5, j) = t * eL;
    }
    // The T rows annihilate e^{+-mu2 x} exactly.
    M.entries(4, 4) = M.entries(4, 5) = Complex(0.0, 0.0);
    M.entries(5, 4) = M.entries(5, 5) = Complex(0.0, 0.0);
    return M;
}

Complex det_scaled(const BoundaryMatrix& M) {
    return Eigen::PartialPivLU<Eigen::Matrix<Complex, 6, 6>>(M.entries).determinant();
}

Complex det_factored(int k, Complex mu1, Complex mu2, double L) {
    const Complex ck(static_cast<double>(k), 0.0);
    const Complex e_m1k = std::exp(mu1 * L + ck * L);
    const Complex e_m1 = std::exp(mu1 * L);
    const Complex e_k = std::exp(ck * L);
    const Complex e_m2 = std::exp(mu2 * L);

    const Complex g1 = mu1 * e_m1k - ck * e_m1k - mu1 * e_m1 - ck * e_m1 + e_k * mu1 -
                       mu1 + ck * e_k + ck;
    const Complex g2 = mu1 * e_m1k - ck * e_m1k + mu1 * e_m1 + ck * e_m1 - e_k * mu1 -
                       mu1 - ck * e_k + ck;
    const Complex sq = (mu2 - ck) * (mu2 - ck) * (mu2 + ck) * (mu2 + ck) *
                       (mu2 - mu1) * (mu2 - mu1) * (mu2 + mu1) * (mu2 + mu1);
    return g1 * g2 * sq * (e_m2 - 1.0) * (e_m2 + 1.0) *
           std::exp(-L * mu2 - L * mu1 - ck * L);
}

double det_magnitude_bound(const BoundaryMatrix& M) {
    double bound = M.scale_product();
    for (int i = 0; i < 6; ++i) bound *= M.entries.row(i).norm();
    return bound;
}

}  // namespace bcq
