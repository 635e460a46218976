#pragma once

#include <utility>
#include <vector>

#include "bcq/dispersion.hpp"
#include "bcq/types.hpp"

namespace bcq {

/// First j_max Dirichlet-Laplacian eigenvalues of mode k:
/// lambda_j = -alpha (k^2 + j^2 pi^2 / L^2), strictly decreasing in j.
std::vector<SpectralPoint> dirichlet_eigenvalues(ModeIndex k, const ChannelParams& p,
                                                 int j_max);

/// First `count` Stokes-branch eigenvalues of mode k, from the positive roots
/// mu_tilde of the dispersion function: lambda = -nu (k^2 + mu_tilde^2).
/// The root list itself is independent of nu. Every returned lambda satisfies
/// lambda < -nu k^2 strictly.
std::vector<SpectralPoint> stokes_eigenvalues(ModeIndex k, const ChannelParams& p,
                                              int count,
                                              const TolerancePolicy& tol = {},
                                              RootScanDiagnostics* diag = nullptr);

struct MergedSpectrum {
    std::vector<SpectralPoint> points;  // sorted by decreasing lambda
    /// Pairs of indices into `points` whose eigenvalues coincide across
    /// branches (resonance diagnostic).
    std::vector<std::pair<std::size_t, std::size_t>> coincidences;
};

/// Union of both branches sorted by decreasing lambda; cross-branch ties are
/// flagged, not dropped.
MergedSpectrum merge_spectrum(ModeIndex k, const ChannelParams& p, int count_stokes,
                              int count_dirichlet, const TolerancePolicy& tol = {});

}  // namespace bcq
