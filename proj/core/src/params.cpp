#include "treebound/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treebound {

std::optional<std::string> validate_tree_params(const TreeParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma)) {
        return "alpha, beta, gamma must be finite";
    }
    if (!(p.alpha >= 0.0)) return "alpha < 0";
    if (!(p.alpha <= 1.0)) return "alpha > 1";
    if (!(p.beta >= 0.0)) return "beta < 0";
    if (!(p.gamma >= 0.0)) return "gamma < 0";
    if (!(p.beta + p.gamma <= 1.0)) return "beta + gamma > 1";
    return std::nullopt;
}

std::optional<std::string> validate_star_params(const StarParams& sp) {
    if (!std::isfinite(sp.alpha_star) || !std::isfinite(sp.beta_star)) {
        return "alpha_star, beta_star must be finite";
    }
    if (!(sp.alpha_star >= 0.0)) return "alpha_star < 0";
    if (!(sp.beta_star >= 0.0)) return "beta_star < 0";
    if (!(sp.alpha_star + sp.beta_star <= 1.0)) return "alpha_star + beta_star > 1";
    return std::nullopt;
}

TreeParams checked_tree_params(double alpha, double beta, double gamma) {
    TreeParams p{alpha, beta, gamma};
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error("tree params: " + *err);
    }
    return p;
}

StarParams checked_star_params(double alpha_star, double beta_star) {
    StarParams sp{alpha_star, beta_star};
    if (auto err = validate_star_params(sp)) {
        throw std::domain_error("star params: " + *err);
    }
    return sp;
}

StarParams star_params(const TreeParams& p) {
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error("star_params: " + *err);
    }
    const double as = std::min(p.alpha, p.gamma);
    const double bs = std::min(p.beta + p.gamma, p.alpha) - as;
    return StarParams{as, bs};
}

StarParams star_params_lambda(const TreeParams& p, double lam) {
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error("star_params_lambda: " + *err);
    }
    if (!(lam >= 0.0 && lam <= 1.0)) {
        throw std::domain_error("star_params_lambda: lambda outside [0, 1]");
    }
    // Endpoint pairs, both summing to min{beta+gamma, alpha}: written as
    // sum - alpha_star (algebraically equal to min{beta, max{alpha-gamma, 0}}
    // resp. min{alpha, beta}) so the family shares rounding with star_params.
    const double sum = std::min(p.beta + p.gamma, p.alpha);
    const double as1 = std::min(p.alpha, p.gamma);
    const double as0 = std::min(p.gamma, std::max(p.alpha - p.beta, 0.0));
    const double bs1 = sum - as1;
    const double bs0 = sum - as0;
    return StarParams{lam * as1 + (1.0 - lam) * as0, lam * bs1 + (1.0 - lam) * bs0};
}

}  // namespace treebound
