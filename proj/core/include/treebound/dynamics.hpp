#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "treebound/matrix.hpp"
#include "treebound/params.hpp"
#include "treebound/rng.hpp"
#include "treebound/topology.hpp"

namespace treebound {

enum class MatrixMode {
    Tight,  // constrained masses sit exactly at their lower bounds
    Slack,  // constrained masses drawn uniformly in [bound, bound + remaining slack]
};

enum class InitialCondition {
    RandomUniform,
    WorstCaseSplit,  // root at 0, every other agent at 1
    UserSupplied,
};

struct SimulationConfig {
    NestedSets nested;
    TreeParams params;
    int horizon = 1;
    std::uint64_t seed = 0;
    MatrixMode mode = MatrixMode::Tight;
    InitialCondition initial = InitialCondition::WorstCaseSplit;
    std::vector<double> initial_state;  // used when initial == UserSupplied
};

struct Trajectory {
    // states[t] is x(t) for t = 0..horizon; diameters[t] the matching vector of
    // set diameters, length depth+1, first entry always 0 (root singleton).
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> diameters;

    int steps() const { return static_cast<int>(states.size()) - 1; }
};

// Diameters at or below this are treated as finite-time consensus.
inline constexpr double kDiameterFloor = 1e-300;

// Draws a row-stochastic matrix satisfying the weight bounds for the given
// nested structure. Tight mode places the root diagonal exactly at alpha and,
// per non-root row, exactly beta on the diagonal and exactly gamma on one
// uniformly chosen member of the next-closer set; the leftover mass is spread
// over uniformly sampled unconstrained columns. Slack mode draws the
// constrained masses uniformly above their bounds instead.
DenseMatrix random_system_matrix(const NestedSets& ns, const TreeParams& p,
                                 SplitMix64& rng, MatrixMode mode);

// x(t+1) = A x(t). Requires a square A with x.size() == A.cols().
std::vector<double> step(const DenseMatrix& a, std::span<const double> x);

// (max - min) of x over each nested set N_0..N_depth; length depth+1,
// entry 0 is 0 and entries are nondecreasing.
std::vector<double> diameter_vector(std::span<const double> x, const NestedSets& ns);

// Iterates the dynamics with a fresh compliant matrix each step, drawn from a
// SplitMix64 stream seeded by cfg.seed (the initial state consumes the stream
// first when random). Identical configs produce bit-identical trajectories.
Trajectory run_simulation(const SimulationConfig& cfg);

// Same recording harness for a constant matrix (the stationary witnesses).
Trajectory run_stationary(const DenseMatrix& a, const NestedSets& ns,
                          std::span<const double> x0, int horizon);

// Asymptotic per-step contraction estimate from the full-set diameter: a
// least-squares fit of ln diam(t) over [burn_in, horizon] against {1, t, ln(t+1)},
// exponentiating the t-coefficient. The ln(t+1) regressor absorbs the
// polynomial prefactors of defective spectra (a pure slope fit overestimates
// the rate of t^k r^t sequences at any usable horizon); its coefficient is
// constrained to be nonnegative, falling back to the plain slope otherwise.
// The window is cut where the diameter reaches the consensus floor (the
// absolute kDiameterFloor or 1e-12 of the state magnitude, below which the
// spread is matvec rounding noise), and returns 0 when consensus arrives
// within the window. Returns 1 for a constant diameter.
// Requires diam(0) > 0 and horizon > burn_in + 10.
double empirical_rate(const Trajectory& traj, int burn_in);

// Componentwise next <= comparison * prev, with slack tol.
bool verify_comparison_step(std::span<const double> prev, std::span<const double> next,
                            const DenseMatrix& comparison, double tol = 1e-10);

// First step t whose diameter transition violates the comparison bound, if any.
std::optional<int> first_comparison_violation(const Trajectory& traj,
                                              const DenseMatrix& comparison,
                                              double tol = 1e-10);

// Stationary systems on which the bound is attained exactly.
enum class ExtremalKind {
    Cycle,        // pure rotation: never contracts (alpha = 0)
    Identity,     // never communicates (gamma = 0)
    LeaderChain,  // beta I + (1-beta)(J + e1 e1'): contracts exactly at rate beta
};

DenseMatrix extremal_system(ExtremalKind kind, int n, double beta = 0.0);

// CSV with header t,delta_1,...,delta_{depth+1},rate_estimate; one row per
// recorded step, floats at 17 significant digits. The per-run rate estimate is
// repeated on every row.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double rate_estimate);

}  // namespace treebound
