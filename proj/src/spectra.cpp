#include "bcq/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace bcq {

std::vector<SpectralPoint> dirichlet_eigenvalues(ModeIndex k, const ChannelParams& p,
                                                 int j_max) {
    if (j_max < 1) throw ConfigError("j_max must be >= 1");
    std::vector<SpectralPoint> pts;
    pts.reserve(j_max);
    for (int j = 1; j <= j_max; ++j) {
        const double w = j * M_PI / p.L;
        const double lambda = -p.alpha * (static_cast<double>(k.k) * k.k + w * w);
        SpectralPoint pt;
        pt.branch = Branch::Dirichlet;
        pt.k = k.k;
        pt.j = j;
        pt.lambda = lambda;
        auto r1 = characteristic_root(k.k, lambda, p.nu);
        pt.mu1 = r1.mu;
        pt.mu1_tilde = r1.tilde;
        // mu2^2 = k^2 + lambda/alpha = -(j pi / L)^2 exactly.
        pt.mu2 = Complex(0.0, w);
        pt.mu2_tilde = w;
        pts.push_back(pt);
    }
    return pts;
}

std::vector<SpectralPoint> stokes_eigenvalues(ModeIndex k, const ChannelParams& p,
                                              int count, const TolerancePolicy& tol,
                                              RootScanDiagnostics* diag) {
    const std::vector<double> roots = find_dispersion_roots(k.k, p.L, count, tol, diag);
    std::vector<SpectralPoint> pts;
    pts.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double mt = roots[i];
        SpectralPoint pt;
        pt.branch = Branch::Stokes;
        pt.k = k.k;
        pt.j = static_cast<int>(i) + 1;
        pt.lambda = -p.nu * (static_cast<double>(k.k) * k.k + mt * mt);
        pt.mu1 = Complex(0.0, mt);
        pt.mu1_tilde = mt;
        auto r2 = characteristic_root(k.k, pt.lambda, p.alpha);
        pt.mu2 = r2.mu;
        pt.mu2_tilde = r2.tilde;
        pts.push_back(pt);
    }
    return pts;
}

MergedSpectrum merge_spectrum(ModeIndex k, const ChannelParams& p, int count_stokes,
                              int count_dirichlet, const TolerancePolicy& tol) {
    if (count_stokes < 1 || count_dirichlet < 1)
        throw ConfigError("branch counts must be >= 1");
    MergedSpectrum out;
    auto s = stokes_eigenvalues(k, p, count_stokes, tol);
    auto d = dirichlet_eigenvalues(k, p, count_dirichlet);
    out.points.reserve(s.size() + d.size());
    out.points.insert(out.points.end(), s.begin(), s.end());
    out.points.insert(out.points.end(), d.begin(), d.end());
    std::stable_sort(out.points.begin(), out.points.end(),
                     [](const SpectralPoint& a, const SpectralPoint& b) {
                         if (a.lambda != b.lambda) return a.lambda > b.lambda;
                         if (a.branch != b.branch) return a.branch < b.branch;
                         return a.j < b.j;
                     });
    for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
        const auto& a = out.points[i];
        const auto& b = out.points[i + 1];
        if (a.branch != b.branch &&
            std::abs(a.lambda - b.lambda) <= 1e-9 * std::max(1.0, std::abs(a.lambda)))
            out.coincidences.emplace_back(i, i + 1);
    }
    return out;
}

}  // namespace bcq
