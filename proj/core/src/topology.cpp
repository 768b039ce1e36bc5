#include "treebound/topology.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace treebound {

std::optional<std::string> validate_shape(const TreeShape& s) {
    const int n = s.agents();
    if (n < 1) return "shape has no agents";
    if (s.fathers[0] != -1) return "agent 1 must be the root";
    for (int i = 1; i < n; ++i) {
        if (s.fathers[i] < 0 || s.fathers[i] >= i) {
            return "agent " + std::to_string(i + 1) + ": father must lie in {1.." +
                   std::to_string(i) + "}";
        }
    }
    return std::nullopt;
}

namespace {

TreeShape require_shape(const TreeShape& s, const char* where) {
    if (auto err = validate_shape(s)) {
        throw std::invalid_argument(std::string(where) + ": " + *err);
    }
    return s;
}

}  // namespace

DenseMatrix materialize_tree_matrix(const TreeShape& shape, const TreeParams& p) {
    require_shape(shape, "materialize_tree_matrix");
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error(std::string("materialize_tree_matrix: ") + *err);
    }
    const auto n = static_cast<std::size_t>(shape.agents());
    DenseMatrix m(n, n);
    m(0, 0) = p.alpha;
    for (std::size_t i = 1; i < n; ++i) {
        m(i, i) = p.beta;
        m(i, static_cast<std::size_t>(shape.fathers[i])) = p.gamma;
    }
    return m;
}

DenseMatrix stochastic_completion(DenseMatrix m) {
    if (!m.square()) {
        throw std::invalid_argument("stochastic_completion: square matrix required");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double residual = 1.0 - m.row_sum(i);
        if (residual < -1e-12) {
            throw std::invalid_argument("stochastic_completion: row " + std::to_string(i + 1) +
                                        " already sums above 1");
        }
        if (residual > 0.0) m(i, i) += residual;
    }
    return m;
}

int DepthProfile::depth() const {
    int d = 0;
    for (int r : depths) d = std::max(d, r);
    return d;
}

DepthProfile sequence_depths(std::span<const TreeShape> shapes) {
    if (shapes.empty()) {
        throw std::invalid_argument("sequence_depths: at least one shape required");
    }
    const int n = shapes.front().agents();
    for (const TreeShape& s : shapes) {
        require_shape(s, "sequence_depths");
        if (s.agents() != n) {
            throw std::invalid_argument("sequence_depths: shapes disagree on agent count");
        }
    }
    DepthProfile dp;
    dp.depths.assign(static_cast<std::size_t>(n), 0);
    for (int i = 1; i < n; ++i) {
        int deepest_father = 0;
        for (const TreeShape& s : shapes) {
            deepest_father = std::max(deepest_father, dp.depths[static_cast<std::size_t>(s.fathers[i])]);
        }
        dp.depths[static_cast<std::size_t>(i)] = 1 + deepest_father;
    }
    return dp;
}

NestedSets nested_sets(const DepthProfile& dp) {
    const int n = dp.agents();
    if (n < 1) throw std::invalid_argument("nested_sets: empty depth profile");
    if (dp.depths[0] != 0) throw std::invalid_argument("nested_sets: root depth must be 0");
    for (int i = 1; i < n; ++i) {
        if (dp.depths[static_cast<std::size_t>(i)] < 1) {
            throw std::invalid_argument("nested_sets: non-root agents need depth >= 1");
        }
    }
    NestedSets ns;
    ns.depths = dp.depths;
    ns.members.resize(static_cast<std::size_t>(dp.depth()) + 1);
    for (std::size_t k = 0; k < ns.members.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            if (ns.depths[static_cast<std::size_t>(i)] <= static_cast<int>(k)) {
                ns.members[k].push_back(i);
            }
        }
    }
    return ns;
}

std::string to_string(WeightConstraint c) {
    switch (c) {
        case WeightConstraint::RootSelfWeight: return "root self-weight";
        case WeightConstraint::SameDepthWeight: return "same-depth weight";
        case WeightConstraint::UpstreamWeight: return "upstream weight";
    }
    return "unknown";
}

AssumptionReport check_assumption(const DenseMatrix& a, const NestedSets& ns,
                                  const TreeParams& p) {
    if (auto err = validate_tree_params(p)) {
        throw std::domain_error(std::string("check_assumption: ") + *err);
    }
    const auto n = static_cast<std::size_t>(ns.agents());
    if (!a.square() || a.rows() != n) {
        throw std::invalid_argument("check_assumption: matrix size disagrees with nested sets");
    }
    if (!is_row_stochastic(a, 1e-12)) {
        throw std::invalid_argument("check_assumption: matrix is not row-stochastic");
    }
    constexpr double kSlack = 1e-12;
    AssumptionReport report;
    const auto root = static_cast<std::size_t>(ns.members[0][0]);
    if (a(root, root) < p.alpha - kSlack) {
        report.violations.push_back({static_cast<int>(root), WeightConstraint::RootSelfWeight,
                                     a(root, root), p.alpha});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int k = ns.depths[i];
        if (k == 0) continue;
        double same_depth = 0.0;
        double upstream = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (ns.depths[j] == k) same_depth += a(i, j);
            if (ns.depths[j] < k) upstream += a(i, j);
        }
        if (same_depth < p.beta - kSlack) {
            report.violations.push_back({static_cast<int>(i), WeightConstraint::SameDepthWeight,
                                         same_depth, p.beta});
        }
        if (upstream < p.gamma - kSlack) {
            report.violations.push_back({static_cast<int>(i), WeightConstraint::UpstreamWeight,
                                         upstream, p.gamma});
        }
    }
    return report;
}

std::vector<TreeShape> parse_shapes(std::istream& in) {
    std::vector<TreeShape> shapes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream tokens(line);
        TreeShape shape;
        shape.fathers.push_back(-1);
        int father = 0;
        while (tokens >> father) {
            const int agent = shape.agents() + 1;  // 1-based id being defined
            if (father < 1 || father >= agent) {
                throw std::runtime_error("shapes line " + std::to_string(lineno) + ": agent " +
                                         std::to_string(agent) + " has father " +
                                         std::to_string(father) + " outside {1.." +
                                         std::to_string(agent - 1) + "}");
            }
            shape.fathers.push_back(father - 1);
        }
        if (!tokens.eof()) {
            throw std::runtime_error("shapes line " + std::to_string(lineno) +
                                     ": expected whitespace-separated integers");
        }
        if (shape.agents() < 2) {
            throw std::runtime_error("shapes line " + std::to_string(lineno) +
                                     ": a shape needs at least one father entry");
        }
        if (!shapes.empty() && shapes.front().agents() != shape.agents()) {
            throw std::runtime_error("shapes line " + std::to_string(lineno) +
                                     ": agent count differs from the first shape");
        }
        shapes.push_back(std::move(shape));
    }
    if (shapes.empty()) {
        throw std::runtime_error("shapes input: no shapes found");
    }
    return shapes;
}

std::vector<TreeShape> parse_shapes_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("shapes file: cannot open " + path);
    }
    return parse_shapes(in);
}

void serialize_shapes(std::ostream& out, std::span<const TreeShape> shapes) {
    for (const TreeShape& s : shapes) {
        for (int i = 1; i < s.agents(); ++i) {
            if (i > 1) out << ' ';
            out << s.fathers[static_cast<std::size_t>(i)] + 1;
        }
        out << '\n';
    }
}

}  // namespace treebound
