#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace treebound {

// Inclusive arithmetic progression min, min+step, ..., up to max (within a
// relative fp guard so max itself is always included when it lies on the grid).
struct GridRange {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;
};

std::vector<double> grid_values(const GridRange& r);

// A sweep evaluates the bound on a parameter grid and emits one CSV row per
// point: T,alpha_star,beta_star,rho,classical,gap_ratio. Star sweeps iterate
// T outer, alpha_star middle, beta_star inner; raw sweeps iterate
// T, alpha, beta, gamma and emit the reduced star parameters.
struct SweepSpec {
    std::vector<int> depths;
    bool raw = false;
    GridRange alpha_star, beta_star;  // star mode
    GridRange alpha, beta, gamma;     // raw mode
};

// Description of the offending range or grid point, or nullopt when every
// point lies in the valid parameter domain.
std::optional<std::string> validate_sweep(const SweepSpec& spec);

// Writes header and rows; throws std::invalid_argument on an invalid spec.
// gap_ratio is nan where the classical gap vanishes (alpha_star = 0).
void run_sweep(const SweepSpec& spec, std::ostream& out);

}  // namespace treebound
