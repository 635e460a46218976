#include "bcq/types.hpp"

#include <cmath>

namespace bcq {

ChannelParams::ChannelParams(double nu_, double alpha_, double L_, double sep_tol_)
    : nu(nu_), alpha(alpha_), L(L_), sep_tol(sep_tol_) {
    if (!(sep_tol > 0.0)) throw ConfigError("sep_tol must be positive");
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(L > 0.0)) throw ConfigError("L must be positive");
    if (std::abs(alpha - nu) <= sep_tol)
        throw ConfigError("alpha equals nu (|alpha - nu| <= sep_tol): the adjoint "
                          "characteristic roots mu1, mu2 coincide");
}

ModeIndex::ModeIndex(int k_) : k(k_) {
    if (k == 0) throw ConfigError("0-mode excluded: it is uncontrollable");
}

void TolerancePolicy::validate() const {
    if (!(root_abs_tol > 0.0)) throw ConfigError("tol.root_abs_tol must be positive");
    if (!(residual_rel_tol > 0.0))
        throw ConfigError("tol.residual_rel_tol must be positive");
    if (!(svd_null_ratio > 0.0 && svd_null_ratio < 1.0))
        throw ConfigError("tol.svd_null_ratio must be in (0, 1)");
    if (!(bracket_grid_step > 0.0))
        throw ConfigError("tol.bracket_grid_step must be positive");
}

std::string to_string(Branch b) {
    return b == Branch::Stokes ? "stokes" : "dirichlet";
}

CharacteristicRoot characteristic_root(int k, double lambda, double coef) {
    const double radicand = static_cast<double>(k) * k + lambda / coef;
    if (radicand < 0.0) {
        const double tilde = std::sqrt(-radicand);
        return {Complex(0.0, tilde), tilde};
    }
    return {Complex(std::sqrt(radicand), 0.0), std::nullopt};
}

}  // namespace bcq
