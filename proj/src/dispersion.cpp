#include "bcq/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcq {

namespace {

// Bisection on [a, b] with f(a) f(b) < 0, refined to near machine precision
// in the abscissa (the reporting tolerance in TolerancePolicy is much looser).
double bisect(int k, double L, double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = dispersion_value(k, m, L);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b))
            break;
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<double> find_dispersion_roots(int k, double L, int count,
                                          const TolerancePolicy& tol,
                                          RootScanDiagnostics* diag) {
    if (count < 1) throw ConfigError("root count must be >= 1");
    tol.validate();

    const double step = tol.bracket_grid_step;
    // Roots interlace roughly at spacing pi/L; stop well past where `count`
    // of them must have appeared.
    const double ceiling = (count + 8) * M_PI / L * 4.0 + 16.0 * step;

    std::vector<double> roots;
    RootScanDiagnostics local;
    RootScanDiagnostics& d = diag ? *diag : local;
    d.near_double_roots.clear();

    // Start just above 0 to skip the spurious root there.
    double prev_mu = step * 1e-6;
    double prev_val = dispersion_value(k, prev_mu, L);
    double prev_prev_abs = std::numeric_limits<double>::infinity();

    double mu = step;
    long samples = 0;
    const long max_samples = 2'000'000;
    while (static_cast<int>(roots.size()) < count && mu <= ceiling) {
        if (++samples > max_samples)
            throw NumericError("dispersion root search exhausted its sample budget: "
                               "bracket_grid_step is too small for the required count");
        const double val = dispersion_value(k, mu, L);
        if (val == 0.0) {
            roots.push_back(mu);
        } else if ((prev_val < 0.0) != (val < 0.0)) {
            roots.push_back(bisect(k, L, prev_mu, mu, prev_val));
        } else {
            // Same sign: check for a deep dip of |D| (candidate even-order root).
            const double cur_abs = std::abs(val);
            const double mid_abs = std::abs(prev_val);
            if (mid_abs < prev_prev_abs && mid_abs < cur_abs &&
                mid_abs <= 1e-6 * std::max(prev_prev_abs, cur_abs) &&
                std::isfinite(prev_prev_abs)) {
                d.near_double_roots.push_back({prev_mu - step, mu, mid_abs});
            }
        }
        prev_prev_abs = std::abs(prev_val);
        prev_mu = mu;
        prev_val = val;
        mu += step;
    }
    d.search_ceiling = prev_mu;

    if (static_cast<int>(roots.size()) < count)
        throw NumericError("dispersion root search exhausted: found " +
                           std::to_string(roots.size()) + " of " +
                           std::to_string(count) + " roots below mu_tilde = " +
                           std::to_string(prev_mu));

    // Interlacing count check on the searched range.
    const double reached = roots.back();
    const int expected = static_cast<int>(std::floor(reached * L / M_PI)) - 2;
    d.count_growth_ok = static_cast<int>(roots.size()) >= expected;

    return roots;
}

}  // namespace bcq
