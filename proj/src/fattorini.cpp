#include "bcq/fattorini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcq/boundary_matrix.hpp"
#include "bcq/dispersion.hpp"
#include "bcq/spectra.hpp"

namespace bcq {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::observable: return "observable";
        case Verdict::not_observable: return "not_observable";
        default: return "inconclusive";
    }
}

MultiplierMatrix build_R(int k, Complex mu1, Complex mu2, double L, double sep_tol) {
    require_root_separation(k, mu1, mu2, sep_tol);
    MultiplierMatrix R;
    R.k = k;
    R.mu1 = mu1;
    R.mu2 = mu2;
    R.L = L;
    const Complex ck(static_cast<double>(k), 0.0);
    const Complex ms[3] = {ck, mu1, mu2};
    for (int j = 0; j < 3; ++j) {
        const Complex m = ms[j];
        R.entries(0, j) = m;                          // f'(0) on sinh(m x)
        R.entries(1, j) = std::sinh(m * L);           // f(L)
        R.entries(2, j) = m * std::cosh(m * L);       // f'(L)
    }
    return R;
}

Complex det_R(const MultiplierMatrix& R) { return R.entries.determinant(); }

double normalized_det_R(const MultiplierMatrix& R) {
    double rows = 1.0;
    for (int i = 0; i < 3; ++i) rows *= R.entries.row(i).norm();
    if (!(rows > 0.0)) return 0.0;
    return std::abs(det_R(R)) / rows;
}

double F_value(int k, double mu1_tilde, double mu2_tilde, double L) {
    const double dk = static_cast<double>(k);
    const double shk = std::sinh(dk * L);
    const double chk = std::cosh(dk * L);
    const double s1 = std::sin(mu1_tilde * L), c1 = std::cos(mu1_tilde * L);
    const double s2 = std::sin(mu2_tilde * L), c2 = std::cos(mu2_tilde * L);
    const double f1 = c2 * (dk * s1 - shk * mu1_tilde) + shk * mu1_tilde * c1 -
                      dk * chk * s1;
    return f1 * mu2_tilde + mu1_tilde * s2 * dk * chk - mu1_tilde * c1 * s2 * dk;
}

AlphaScanReport scan_alpha(ModeIndex k, int j, double nu, double L, double alpha_lo,
                           double alpha_hi, double grid_step,
                           const TolerancePolicy& tol) {
    if (!(nu > 0.0) || !(L > 0.0)) throw ConfigError("nu and L must be positive");
    if (!(alpha_lo > 0.0) || !(alpha_hi < nu) || !(alpha_lo < alpha_hi))
        throw ConfigError("scan interval must satisfy 0 < alpha_lo < alpha_hi < nu "
                          "(mu2 is singular at alpha -> 0 and degenerate at alpha -> nu)");
    if (!(grid_step > 0.0)) throw ConfigError("grid_step must be positive");
    if (j < 1) throw ConfigError("j must be >= 1");

    // The scanned Stokes eigenvalue is alpha-independent.
    const std::vector<double> roots = find_dispersion_roots(k.k, L, j, tol);
    const double mt1 = roots[static_cast<std::size_t>(j - 1)];
    const double kk = static_cast<double>(k.k) * k.k;
    const double lambda = -nu * (kk + mt1 * mt1);
    if (!(lambda < -nu * kk))
        throw NumericError("lambda is not a Stokes eigenvalue (lambda >= -nu k^2)");

    auto mt2_of = [&](double alpha) { return std::sqrt(-kk - lambda / alpha); };
    auto F_of = [&](double alpha) { return F_value(k.k, mt1, mt2_of(alpha), L); };

    AlphaScanReport rep;
    rep.k = k.k;
    rep.j = j;
    rep.nu = nu;
    rep.L = L;
    rep.lambda = lambda;
    rep.alpha_lo = alpha_lo;
    rep.alpha_hi = alpha_hi;
    rep.grid_step = grid_step;

    // Sample, bracket sign changes, bisect each bracket to near machine
    // precision in alpha.
    std::vector<double> grid_alpha, grid_val;
    for (double a = alpha_lo; a < alpha_hi + 0.5 * grid_step; a += grid_step) {
        const double ac = std::min(a, alpha_hi);
        grid_alpha.push_back(ac);
        grid_val.push_back(F_of(ac));
        if (ac >= alpha_hi) break;
    }
    for (std::size_t i = 0; i + 1 < grid_alpha.size(); ++i) {
        double a = grid_alpha[i], b = grid_alpha[i + 1];
        double fa = grid_val[i], fb = grid_val[i + 1];
        if (fa == 0.0) {
            rep.zeros.push_back({a, 0.0});
            continue;
        }
        if ((fa < 0.0) == (fb < 0.0)) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            const double fm = F_of(mid);
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fa < 0.0) == (fm < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
        }
        const double zero = 0.5 * (a + b);
        rep.zeros.push_back({zero, std::abs(F_of(zero))});
    }
    if (!grid_val.empty() && grid_val.back() == 0.0)
        rep.zeros.push_back({grid_alpha.back(), 0.0});

    // Margin: smallest |F| on grid points at least two steps from any zero.
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_alpha.size(); ++i) {
        bool near = false;
        for (const auto& z : rep.zeros)
            if (std::abs(grid_alpha[i] - z.alpha) < 2.0 * grid_step) near = true;
        if (!near) margin = std::min(margin, std::abs(grid_val[i]));
    }
    rep.verdict_margin = std::isfinite(margin) ? margin : 0.0;
    return rep;
}

VerdictReport uc_verdict(const SpectralPoint& pt, const ChannelParams& p,
                         const TolerancePolicy& tol) {
    VerdictReport rep;
    rep.point = pt;

    if (pt.branch == Branch::Dirichlet) {
        // xi = sin(j pi x / L): the observation (j pi / L)(-1)^j never vanishes.
        rep.verdict = Verdict::observable;
        rep.obs_abs = pt.j * M_PI / p.L;
        rep.det_r_normalized = std::numeric_limits<double>::quiet_NaN();
        rep.null_ratio = 0.0;
        rep.note = "dirichlet branch: closed-form observation";
        return rep;
    }

    rep.outside_certified_regime = p.alpha > p.nu;

    const ResonanceDiagnostic res = sin_resonance_check(pt, p, tol);
    rep.resonance_flagged = res.flagged;

    AdjointEigenfunction ef = solve_eigenfunction(pt, p, tol);
    rep.obs_abs = std::abs(ef.obs);
    rep.null_ratio = ef.null_ratio;

    MultiplierMatrix R = build_R(pt.k, pt.mu1, pt.mu2, p.L, p.sep_tol);
    rep.det_r_normalized = normalized_det_R(R);

    if (res.flagged) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "sin(mu2_tilde L) = 0 resonance: nullspace contains the spurious "
                   "sin profile with psi2 = 0; excluded from verdicts";
        return rep;
    }
    if (ef.null_dim >= 2) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "nullspace dimension >= 2 (multiplicity diagnostic)";
        return rep;
    }

    if (rep.det_r_normalized > kDetRThreshold) {
        rep.verdict = Verdict::observable;
        rep.routes_consistent = rep.obs_abs > tol.residual_rel_tol;
        if (!rep.routes_consistent)
            rep.note = "det R route says observable but |xi'(L)| is numerically zero";
        else if (rep.outside_certified_regime)
            rep.note = "alpha > nu: outside the certified regime (general complex det R)";
        return rep;
    }

    // det R numerically singular. Emitting not_observable needs double
    // confirmation: a certified eigenfunction whose observation vanishes.
    if (rep.obs_abs < tol.residual_rel_tol && ef.null_ratio < tol.svd_null_ratio) {
        rep.verdict = Verdict::not_observable;
        rep.note = "|det R| below threshold and |xi'(L)| numerically zero for a "
                   "confirmed eigenfunction";
    } else {
        rep.verdict = Verdict::inconclusive;
        rep.note = "|det R| below threshold but |xi'(L)| = " +
                   std::to_string(rep.obs_abs) + " is not zero; alpha may sit on the "
                   "exceptional set";
    }
    return rep;
}

double ibp_boundary_identity(const AdjointEigenfunction& ef, const ChannelParams& p,
                             Complex A, Complex B, Complex C, int quad_n) {
    if (quad_n < 5 || quad_n % 2 == 0)
        throw ConfigError("quad_n must be odd and >= 5 (composite Simpson)");
    const SpectralPoint& pt = ef.point;
    const double kk = static_cast<double>(pt.k) * pt.k;
    const double ln = pt.lambda / p.nu, la = pt.lambda / p.alpha;
    const double c4 = la + ln + 3.0 * kk;
    const double c2 = (ln + 2.0 * kk) * (la + kk) + kk * (ln + kk);
    const double c0 = kk * (ln + kk) * (la + kk);
    const double L = p.L;

    const Complex fm[3] = {Complex(static_cast<double>(pt.k), 0.0), pt.mu1, pt.mu2};
    const Complex fc[3] = {A, B, C};
    auto f_deriv = [&](double x, int order) {
        Complex s(0.0, 0.0);
        for (int j = 0; j < 3; ++j) {
            Complex mp(1.0, 0.0);
            for (int r = 0; r < order; ++r) mp *= fm[j];
            // Odd derivatives of sinh are cosh and vice versa.
            s += fc[j] * mp * (order % 2 == 0 ? std::sinh(fm[j] * x) : std::cosh(fm[j] * x));
        }
        return s;
    };
    auto xi_deriv = [&](double x, int order) {
        Complex s(0.0, 0.0);
        for (int j = 0; j < 6; ++j) {
            Complex mp(1.0, 0.0);
            for (int r = 0; r < order; ++r) mp *= ef.exponents[j];
            s += ef.coeffs[j] * mp * std::exp(ef.exponents[j] * x);
        }
        return s;
    };

    // Interior bilinear form by composite Simpson:
    //   Q = int_0^L xi''' f''' + c4 xi'' f'' + c2 xi' f' + c0 xi f dx.
    const int n = quad_n - 1;  // even panel count
    const double h = L / n;
    Complex Q(0.0, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double x = i * h;
        const Complex g = xi_deriv(x, 3) * f_deriv(x, 3) + c4 * xi_deriv(x, 2) * f_deriv(x, 2) +
                          c2 * xi_deriv(x, 1) * f_deriv(x, 1) + c0 * xi_deriv(x, 0) * f_deriv(x, 0);
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        Q += wgt * g;
    }
    Q *= h / 3.0;

    // Boundary concomitant of the same half-integration:
    //   [xi^(5) f - xi^(4) f' + xi''' f'' - c4 (xi''' f - xi'' f') + c2 xi' f]_0^L.
    auto concomitant = [&](double x) {
        return xi_deriv(x, 5) * f_deriv(x, 0) - xi_deriv(x, 4) * f_deriv(x, 1) +
               xi_deriv(x, 3) * f_deriv(x, 2) -
               c4 * (xi_deriv(x, 3) * f_deriv(x, 0) - xi_deriv(x, 2) * f_deriv(x, 1)) +
               c2 * xi_deriv(x, 1) * f_deriv(x, 0);
    };
    const Complex bnd = concomitant(L) - concomitant(0.0);

    // Relative defect against the magnitude of the boundary terms.
    double scale = std::abs(Q);
    for (double x : {0.0, L}) {
        scale = std::max(scale, std::abs(xi_deriv(x, 5) * f_deriv(x, 0)));
        scale = std::max(scale, std::abs(xi_deriv(x, 4) * f_deriv(x, 1)));
        scale = std::max(scale, std::abs(c4 * xi_deriv(x, 3) * f_deriv(x, 0)));
        scale = std::max(scale, std::abs(c2 * xi_deriv(x, 1) * f_deriv(x, 0)));
    }
    if (!(scale > 0.0)) return 0.0;
    return std::abs(Q - bnd) / scale;
}

TwoControlReport two_control_verdict(const SpectralPoint& pt, const ChannelParams& p,
                                     const TolerancePolicy& tol) {
    if (pt.branch != Branch::Stokes)
        throw ConfigError("two-control verdict applies to the Stokes branch");
    TwoControlReport rep;
    const Complex ck(static_cast<double>(pt.k), 0.0);
    const Complex ratio = ck / pt.mu1;
    // f = sinh(kx) - (k/mu1) sinh(mu1 x): f'(0) = k - (k/mu1) mu1 = 0.
    const Complex fp0 = ck - ratio * pt.mu1;
    const Complex fpL = ck * std::cosh(ck * p.L) - ratio * pt.mu1 * std::cosh(pt.mu1 * p.L);
    rep.f_prime_0_abs = std::abs(fp0);
    rep.f_prime_L_abs = std::abs(fpL);
    const double scale = std::abs(ck) * std::cosh(std::abs(ck.real()) * p.L);
    rep.verdict = rep.f_prime_L_abs > tol.svd_null_ratio * scale ? Verdict::observable
                                                                 : Verdict::inconclusive;
    return rep;
}

}  // namespace bcq
