#pragma once

#include <optional>
#include <string>

namespace treebound {

// Weight lower bounds (alpha, beta, gamma) of the guaranteed tree structure:
//   alpha: self-weight of the root agent
//   beta:  self/same-depth weight of every non-root agent
//   gamma: weight a non-root agent puts on agents strictly closer to the root
// Row stochasticity of the system matrices forces alpha <= 1 and beta + gamma <= 1.
struct TreeParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

// Reduced pair driving the comparison system:
//   alpha_star = min{alpha, gamma}
//   beta_star  = min{beta + gamma, alpha} - alpha_star
struct StarParams {
    double alpha_star = 0.0;
    double beta_star = 0.0;
};

// Returns a description of the violated inequality, or nullopt when valid.
// Comparisons are exact; out-of-range inputs are never clamped.
std::optional<std::string> validate_tree_params(const TreeParams& p);
std::optional<std::string> validate_star_params(const StarParams& sp);

// Throwing counterparts (std::domain_error) for call sites that require validity.
TreeParams checked_tree_params(double alpha, double beta, double gamma);
StarParams checked_star_params(double alpha_star, double beta_star);

// The reduction (alpha, beta, gamma) -> (alpha_star, beta_star).
StarParams star_params(const TreeParams& p);

// One-parameter family of valid reductions; lam in [0, 1].
//   alpha_star(lam) = lam*min{alpha,gamma} + (1-lam)*min{gamma, max{alpha-beta,0}}
//   beta_star(lam)  = lam*min{beta, max{alpha-gamma,0}} + (1-lam)*min{alpha,beta}
// The sum alpha_star(lam) + beta_star(lam) = min{beta+gamma, alpha} for every lam,
// and lam = 1 reproduces star_params (the reduction with maximal alpha_star).
StarParams star_params_lambda(const TreeParams& p, double lam);

}  // namespace treebound
