#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "bcq/types.hpp"

namespace bcq {

/// Second-difference operator on the N interior points of a uniform grid over
/// (0, L), with homogeneous Dirichlet values at both ends. Symmetric negative
/// definite, tridiagonal.
Eigen::SparseMatrix<double> dirichlet_second_difference(int N, double L);

/// Fourth-difference operator on the same grid with clamped conditions
/// psi = psi' = 0 at both ends; the zero-slope condition is imposed through
/// mirrored ghost values, which modifies the first and last diagonal entries.
/// Symmetric positive definite, pentadiagonal.
Eigen::SparseMatrix<double> clamped_fourth_difference(int N, double L);

/// Smallest `count` eigenpairs of the symmetric positive definite pencil
/// A x = sigma B x, by inverse subspace iteration with B-orthonormalization
/// and Rayleigh-Ritz extraction. Deterministic for a fixed seed.
struct PencilEigenResult {
    Eigen::VectorXd sigmas;   // ascending
    Eigen::MatrixXd vectors;  // N x count, B-orthonormal
};
PencilEigenResult smallest_pencil_eigens(const Eigen::SparseMatrix<double>& A,
                                         const Eigen::SparseMatrix<double>& B, int count,
                                         std::uint64_t seed = 0x5eedull);

/// Finite-difference eigenvalues of the per-mode Stokes block
///
///   nu psi'''' - (lambda + 2 nu k^2) psi'' + k^2 (lambda + nu k^2) psi = 0,
///   psi = psi' = 0 at both walls,
///
/// discretized as the generalized symmetric eigenproblem
/// nu (psi'''' - 2 k^2 psi'' + k^4 psi) = -lambda (k^2 psi - psi'') with
/// second-order central differences. Returns the `count` largest (least
/// negative) lambda in decreasing order together with B-orthonormal discrete
/// eigenvectors and pencil residuals. Independent of the dispersion-root path;
/// serves as its verification oracle and as the Galerkin Stokes block.
struct FdStokesResult {
    std::vector<double> lambdas;  // decreasing (closest to zero first)
    Eigen::MatrixXd vectors;      // N x count
    std::vector<double> residuals;  // ||A v - sigma B v|| / (sigma ||B v||)
};
FdStokesResult fd_stokes_oracle(int k, const ChannelParams& p, int N, int count);

}  // namespace bcq
