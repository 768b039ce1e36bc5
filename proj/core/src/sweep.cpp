#include "treebound/sweep.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "treebound/format.hpp"
#include "treebound/params.hpp"
#include "treebound/spectral.hpp"

namespace treebound {

std::vector<double> grid_values(const GridRange& r) {
    if (!(r.step > 0.0)) {
        throw std::invalid_argument("grid range: step must be > 0");
    }
    if (!(r.min <= r.max)) {
        throw std::invalid_argument("grid range: min must not exceed max");
    }
    if (!((r.max - r.min) / r.step < 2e7)) {
        throw std::invalid_argument("grid range: more than 2e7 points");
    }
    std::vector<double> values;
    const double guard = r.step * 1e-9;
    for (long long k = 0;; ++k) {
        const double v = r.min + static_cast<double>(k) * r.step;
        if (v > r.max + guard) break;
        values.push_back(std::min(v, r.max));
    }
    return values;
}

namespace {

std::optional<std::string> check_unit_range(const GridRange& r, const char* name) {
    if (!(r.step > 0.0)) return std::string(name) + ": step must be > 0";
    if (!(r.min <= r.max)) return std::string(name) + ": min must not exceed max";
    if (!(r.min >= 0.0 && r.max <= 1.0)) return std::string(name) + ": range outside [0, 1]";
    return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_sweep(const SweepSpec& spec) {
    if (spec.depths.empty()) return "at least one depth required";
    for (int d : spec.depths) {
        if (d < 1) return "depth must be >= 1";
    }
    if (!spec.raw) {
        if (auto err = check_unit_range(spec.alpha_star, "alpha_star")) return err;
        if (auto err = check_unit_range(spec.beta_star, "beta_star")) return err;
        for (double as : grid_values(spec.alpha_star)) {
            for (double bs : grid_values(spec.beta_star)) {
                if (auto err = validate_star_params({as, bs})) {
                    return "grid point (" + format_double(as) + ", " + format_double(bs) +
                           "): " + *err;
                }
            }
        }
    } else {
        if (auto err = check_unit_range(spec.alpha, "alpha")) return err;
        if (auto err = check_unit_range(spec.beta, "beta")) return err;
        if (auto err = check_unit_range(spec.gamma, "gamma")) return err;
        for (double b : grid_values(spec.beta)) {
            for (double g : grid_values(spec.gamma)) {
                if (auto err = validate_tree_params({0.0, b, g})) {
                    return "grid point (beta=" + format_double(b) +
                           ", gamma=" + format_double(g) + "): " + *err;
                }
            }
        }
    }
    return std::nullopt;
}

void run_sweep(const SweepSpec& spec, std::ostream& out) {
    if (auto err = validate_sweep(spec)) {
        throw std::invalid_argument("sweep: " + *err);
    }
    out << "T,alpha_star,beta_star,rho,classical,gap_ratio\n";
    const auto emit = [&out](int depth, const StarParams& sp) {
        const double rho = rho_bound(depth, sp).rho;
        const double classical = classical_bound(depth, sp.alpha_star);
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (sp.alpha_star > 0.0) {
            ratio = spectral_gap_ratio(depth, sp, sp.alpha_star);
        }
        out << depth << ',' << format_double(sp.alpha_star) << ','
            << format_double(sp.beta_star) << ',' << format_double(rho) << ','
            << format_double(classical) << ',' << format_double(ratio) << '\n';
    };
    if (!spec.raw) {
        for (int depth : spec.depths) {
            for (double as : grid_values(spec.alpha_star)) {
                for (double bs : grid_values(spec.beta_star)) {
                    emit(depth, StarParams{as, bs});
                }
            }
        }
    } else {
        for (int depth : spec.depths) {
            for (double a : grid_values(spec.alpha)) {
                for (double b : grid_values(spec.beta)) {
                    for (double g : grid_values(spec.gamma)) {
                        emit(depth, star_params(TreeParams{a, b, g}));
                    }
                }
            }
        }
    }
}

}  // namespace treebound
