#include "treebound/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "treebound/format.hpp"

namespace treebound {

namespace {

void require_nested(const NestedSets& ns, const char* where) {
    if (ns.agents() < 1 || ns.members.empty() || ns.members[0].size() != 1) {
        throw std::invalid_argument(std::string(where) + ": malformed nested sets");
    }
}

// Splits `remainder` over 1..pool.size() uniformly drawn pool columns with
// random proportions; an empty pool pushes everything onto the diagonal.
void spread_remainder(DenseMatrix& a, std::size_t row, double remainder, SplitMix64& rng,
                      const std::vector<std::size_t>& pool) {
    if (remainder <= 0.0) return;
    if (pool.empty()) {
        a(row, row) += remainder;
        return;
    }
    const std::size_t draws = 1 + rng.next_below(pool.size());
    std::vector<double> weights(draws);
    double total = 0.0;
    for (double& w : weights) {
        w = rng.next_unit();
        total += w;
    }
    if (total == 0.0) {
        weights[0] = 1.0;
        total = 1.0;
    }
    for (std::size_t d = 0; d < draws; ++d) {
        const std::size_t col = pool[rng.next_below(pool.size())];
        a(row, col) += remainder * (weights[d] / total);
    }
}

// 3x3 linear solve, partial pivoting. The normal equations here are tiny and
// well separated after centering.
void solve3(double m[3][3], double rhs[3], double out[3]) {
    int perm[3] = {0, 1, 2};
    for (int p = 0; p < 3; ++p) {
        int piv = p;
        for (int q = p + 1; q < 3; ++q) {
            if (std::abs(m[perm[q]][p]) > std::abs(m[perm[piv]][p])) piv = q;
        }
        std::swap(perm[p], perm[piv]);
        for (int q = p + 1; q < 3; ++q) {
            const double f = m[perm[q]][p] / m[perm[p]][p];
            for (int c = p; c < 3; ++c) m[perm[q]][c] -= f * m[perm[p]][c];
            rhs[perm[q]] -= f * rhs[perm[p]];
        }
    }
    for (int p = 2; p >= 0; --p) {
        double v = rhs[perm[p]];
        for (int q = p + 1; q < 3; ++q) v -= m[perm[p]][q] * out[q];
        out[p] = v / m[perm[p]][p];
    }
}

}  // namespace

DenseMatrix random_system_matrix(const NestedSets& ns, const TreeParams& p,
                                 SplitMix64& rng, MatrixMode mode) {
    require_nested(ns, "random_system_matrix");
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error(std::string("random_system_matrix: ") + *err);
    }
    const auto n = static_cast<std::size_t>(ns.agents());
    DenseMatrix a(n, n);
    if (n == 1) {
        a(0, 0) = 1.0;
        return a;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int k = ns.depths[i];
        std::vector<std::size_t> pool;
        pool.reserve(n);
        if (k == 0) {
            double self = p.alpha;
            if (mode == MatrixMode::Slack) self += rng.next_unit() * (1.0 - p.alpha);
            a(i, i) = self;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) pool.push_back(j);
            }
            spread_remainder(a, i, 1.0 - self, rng, pool);
        } else {
            const auto& upstream = ns.members[static_cast<std::size_t>(k - 1)];
            const auto father =
                static_cast<std::size_t>(upstream[rng.next_below(upstream.size())]);
            double to_father = p.gamma;
            double to_self = p.beta;
            if (mode == MatrixMode::Slack) {
                to_father += rng.next_unit() * (1.0 - p.beta - p.gamma);
                to_self += rng.next_unit() * (1.0 - to_father - p.beta);
            }
            a(i, father) += to_father;
            a(i, i) += to_self;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i && j != father) pool.push_back(j);
            }
            spread_remainder(a, i, 1.0 - to_father - to_self, rng, pool);
        }
    }
    return a;
}

std::vector<double> step(const DenseMatrix& a, std::span<const double> x) {
    if (!a.square()) {
        throw std::invalid_argument("step: square matrix required");
    }
    return a.apply(x);
}

std::vector<double> diameter_vector(std::span<const double> x, const NestedSets& ns) {
    require_nested(ns, "diameter_vector");
    if (x.size() != static_cast<std::size_t>(ns.agents())) {
        throw std::invalid_argument("diameter_vector: state size disagrees with nested sets");
    }
    const int depth = ns.depth();
    std::vector<double> delta(static_cast<std::size_t>(depth) + 1, 0.0);
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= depth; ++k) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (ns.depths[i] == k) {
                mx = std::max(mx, x[i]);
                mn = std::min(mn, x[i]);
            }
        }
        delta[static_cast<std::size_t>(k)] = mx - mn;
    }
    return delta;
}

Trajectory run_simulation(const SimulationConfig& cfg) {
    require_nested(cfg.nested, "run_simulation");
    if (auto err = validate_tree_params(cfg.params)) {
        throw std::domain_error(std::string("run_simulation: ") + *err);
    }
    if (cfg.horizon < 1) {
        throw std::invalid_argument("run_simulation: horizon must be >= 1");
    }
    const auto n = static_cast<std::size_t>(cfg.nested.agents());
    SplitMix64 rng(cfg.seed);

    std::vector<double> x;
    switch (cfg.initial) {
        case InitialCondition::RandomUniform:
            x.resize(n);
            for (double& v : x) v = rng.next_unit();
            break;
        case InitialCondition::WorstCaseSplit:
            x.assign(n, 1.0);
            x[static_cast<std::size_t>(cfg.nested.members[0][0])] = 0.0;
            break;
        case InitialCondition::UserSupplied:
            if (cfg.initial_state.size() != n) {
                throw std::invalid_argument("run_simulation: initial state size disagrees");
            }
            x = cfg.initial_state;
            break;
    }

    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    traj.diameters.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    traj.states.push_back(x);
    traj.diameters.push_back(diameter_vector(x, cfg.nested));
    for (int t = 0; t < cfg.horizon; ++t) {
        const DenseMatrix a = random_system_matrix(cfg.nested, cfg.params, rng, cfg.mode);
        x = step(a, x);
        traj.states.push_back(x);
        traj.diameters.push_back(diameter_vector(x, cfg.nested));
    }
    return traj;
}

Trajectory run_stationary(const DenseMatrix& a, const NestedSets& ns,
                          std::span<const double> x0, int horizon) {
    require_nested(ns, "run_stationary");
    if (horizon < 1) {
        throw std::invalid_argument("run_stationary: horizon must be >= 1");
    }
    if (!a.square() || a.rows() != static_cast<std::size_t>(ns.agents())) {
        throw std::invalid_argument("run_stationary: matrix size disagrees with nested sets");
    }
    std::vector<double> x(x0.begin(), x0.end());
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.diameters.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.states.push_back(x);
    traj.diameters.push_back(diameter_vector(x, ns));
    for (int t = 0; t < horizon; ++t) {
        x = step(a, x);
        traj.states.push_back(x);
        traj.diameters.push_back(diameter_vector(x, ns));
    }
    return traj;
}

double empirical_rate(const Trajectory& traj, int burn_in) {
    const int horizon = traj.steps();
    if (burn_in < 0) {
        throw std::invalid_argument("empirical_rate: burn_in must be >= 0");
    }
    if (horizon <= burn_in + 10) {
        throw std::invalid_argument("empirical_rate: horizon must exceed burn_in + 10");
    }
    if (!(traj.diameters.front().back() > 0.0)) {
        throw std::invalid_argument("empirical_rate: initial diameter must be positive");
    }

    // A diameter at the rounding scale of the states is consensus, not signal:
    // once agents agree to ~1e-12 of their own magnitude the residual spread is
    // matvec noise and would otherwise read as a flat tail in the fit.
    const auto at_floor = [&traj](int t) {
        const double d = traj.diameters[static_cast<std::size_t>(t)].back();
        if (d <= kDiameterFloor) return true;
        double scale = 0.0;
        for (double v : traj.states[static_cast<std::size_t>(t)]) {
            scale = std::max(scale, std::abs(v));
        }
        return d <= 1e-12 * scale;
    };

    int end = horizon;
    for (int t = burn_in; t <= horizon; ++t) {
        if (at_floor(t)) {
            end = t - 1;
            break;
        }
    }
    if (end - burn_in < 10) return 0.0;  // consensus within the window

    const double first = traj.diameters[static_cast<std::size_t>(burn_in)].back();
    bool constant = true;
    for (int t = burn_in; t <= end; ++t) {
        if (traj.diameters[static_cast<std::size_t>(t)].back() != first) constant = false;
    }
    if (constant) return 1.0;

    // ln d(t) ~ c0 + c1 t + c2 ln(t+1): the ln regressor soaks up the
    // polynomial prefactors of defective spectra, so c1 estimates the
    // log-rate. Prefactor degrees are nonnegative here; a fit that wants
    // c2 < 0 is chasing structure the model does not have, so it falls back
    // to the plain slope. Regressors centered for conditioning; centering
    // leaves c1 unchanged.
    const int m = end - burn_in + 1;
    double tbar = 0.0, lbar = 0.0;
    for (int t = burn_in; t <= end; ++t) {
        tbar += t;
        lbar += std::log(static_cast<double>(t) + 1.0);
    }
    tbar /= m;
    lbar /= m;
    double g[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (int t = burn_in; t <= end; ++t) {
        const double r[3] = {1.0, t - tbar, std::log(static_cast<double>(t) + 1.0) - lbar};
        const double y = std::log(traj.diameters[static_cast<std::size_t>(t)].back());
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) g[p][q] += r[p] * r[q];
            rhs[p] += r[p] * y;
        }
    }
    const double plain_slope = rhs[1] / g[1][1];  // solve3 clobbers g and rhs
    double coeff[3];
    solve3(g, rhs, coeff);
    if (coeff[2] < 0.0) coeff[1] = plain_slope;
    return std::exp(coeff[1]);
}

bool verify_comparison_step(std::span<const double> prev, std::span<const double> next,
                            const DenseMatrix& comparison, double tol) {
    if (!comparison.square() || prev.size() != comparison.cols() ||
        next.size() != comparison.rows()) {
        throw std::invalid_argument("verify_comparison_step: dimension mismatch");
    }
    const std::vector<double> bound = comparison.apply(prev);
    for (std::size_t i = 0; i < bound.size(); ++i) {
        if (next[i] > bound[i] + tol) return false;
    }
    return true;
}

std::optional<int> first_comparison_violation(const Trajectory& traj,
                                              const DenseMatrix& comparison, double tol) {
    for (int t = 0; t < traj.steps(); ++t) {
        const auto& prev = traj.diameters[static_cast<std::size_t>(t)];
        const auto& next = traj.diameters[static_cast<std::size_t>(t) + 1];
        if (!verify_comparison_step(prev, next, comparison, tol)) return t;
    }
    return std::nullopt;
}

DenseMatrix extremal_system(ExtremalKind kind, int n, double beta) {
    if (n < 2) {
        throw std::invalid_argument("extremal_system: n must be >= 2");
    }
    const auto un = static_cast<std::size_t>(n);
    switch (kind) {
        case ExtremalKind::Identity:
            return DenseMatrix::identity(un);
        case ExtremalKind::Cycle: {
            DenseMatrix m(un, un);
            m(0, un - 1) = 1.0;
            for (std::size_t i = 1; i < un; ++i) m(i, i - 1) = 1.0;
            return m;
        }
        case ExtremalKind::LeaderChain: {
            if (!(beta >= 0.0 && beta <= 1.0)) {
                throw std::domain_error("extremal_system: beta outside [0, 1]");
            }
            DenseMatrix m(un, un);
            m(0, 0) = 1.0;
            for (std::size_t i = 1; i < un; ++i) {
                m(i, i) = beta;
                m(i, i - 1) = 1.0 - beta;
            }
            return m;
        }
    }
    throw std::invalid_argument("extremal_system: unknown kind");
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double rate_estimate) {
    if (traj.diameters.empty()) {
        throw std::invalid_argument("write_trajectory_csv: empty trajectory");
    }
    const std::size_t width = traj.diameters.front().size();
    out << 't';
    for (std::size_t k = 1; k <= width; ++k) out << ",delta_" << k;
    out << ",rate_estimate\n";
    for (std::size_t t = 0; t < traj.diameters.size(); ++t) {
        out << t;
        for (double v : traj.diameters[t]) out << ',' << format_double(v);
        out << ',' << format_double(rate_estimate) << '\n';
    }
}

}  // namespace treebound
