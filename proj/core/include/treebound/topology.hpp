#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treebound/matrix.hpp"
#include "treebound/params.hpp"

namespace treebound {

// A rooted tree on agents 0..n-1 where information flows from lower to higher
// indexes: agent 0 is the root and fathers[i] < i for every i >= 1.
// fathers[0] is the sentinel -1. Text formats use 1-based agent ids.
struct TreeShape {
    std::vector<int> fathers;  // size n; fathers[0] == -1

    int agents() const { return static_cast<int>(fathers.size()); }
};

std::optional<std::string> validate_shape(const TreeShape& s);

// Lower-bound matrix induced by a shape and (alpha, beta, gamma):
// row 0 carries alpha on the diagonal; row i >= 1 carries beta on the diagonal
// and gamma on the father column; everything else is zero.
DenseMatrix materialize_tree_matrix(const TreeShape& shape, const TreeParams& p);

// Pushes each row's residual mass 1 - row_sum onto the diagonal, turning a
// lower-bound matrix into a row-stochastic one without disturbing the bounds.
DenseMatrix stochastic_completion(DenseMatrix m);

// Guaranteed hop counts from the root: depths[0] = 0 and, for i >= 1,
//   depths[i] = 1 + max over shapes of depths[shape.fathers[i]].
// The overall depth is max_i depths[i].
struct DepthProfile {
    std::vector<int> depths;

    int agents() const { return static_cast<int>(depths.size()); }
    int depth() const;
};

// Depth profile of a sequence in which every listed shape recurs infinitely
// often. Shapes that occur only finitely often must not be passed. The result
// does not depend on the list order. All shapes must share the agent count.
DepthProfile sequence_depths(std::span<const TreeShape> shapes);

// Nested families N_0 c N_1 c ... c N_depth with N_k = {i : depths[i] <= k}.
// N_0 is the root singleton and N_depth contains every agent.
struct NestedSets {
    std::vector<int> depths;                // per-agent depth d_i
    std::vector<std::vector<int>> members;  // members[k] = sorted N_k

    int agents() const { return static_cast<int>(depths.size()); }
    int depth() const { return static_cast<int>(members.size()) - 1; }
};

NestedSets nested_sets(const DepthProfile& dp);

// The three inequality families a compliant system matrix must satisfy.
enum class WeightConstraint {
    RootSelfWeight,   // a[r][r] >= alpha for the root r
    SameDepthWeight,  // sum over columns at the agent's own depth >= beta
    UpstreamWeight,   // sum over columns strictly closer to the root >= gamma
};

std::string to_string(WeightConstraint c);

struct AssumptionViolation {
    int agent = 0;  // row index, 0-based
    WeightConstraint constraint = WeightConstraint::RootSelfWeight;
    double observed = 0.0;
    double required = 0.0;
};

struct AssumptionReport {
    std::vector<AssumptionViolation> violations;

    bool ok() const { return violations.empty(); }
};

// Verifies the three weight bounds against a concrete row-stochastic matrix.
// An inequality counts as violated only when it fails by more than 1e-12.
// Throws std::invalid_argument when the matrix is not n x n row-stochastic
// (unit row sums within 1e-12, no negative entries).
AssumptionReport check_assumption(const DenseMatrix& a, const NestedSets& ns,
                                  const TreeParams& p);

// Shapes file format: one line per shape, the space-separated 1-based father
// indices of agents 2..n (agent 1 is the implicit root). Blank lines and lines
// starting with '#' are skipped. Parse/serialize round-trips losslessly.
std::vector<TreeShape> parse_shapes(std::istream& in);
std::vector<TreeShape> parse_shapes_file(const std::string& path);
void serialize_shapes(std::ostream& out, std::span<const TreeShape> shapes);

}  // namespace treebound
