#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "treebound/rng.hpp"
#include "treebound/topology.hpp"

using namespace treebound;

namespace {

TreeShape random_shape(SplitMix64& rng, int n) {
    TreeShape s;
    s.fathers.resize(static_cast<std::size_t>(n));
    s.fathers[0] = -1;
    for (int i = 1; i < n; ++i) {
        s.fathers[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
    }
    return s;
}

}  // namespace

TEST_CASE("materialize_tree_matrix") {
    SUBCASE("single agent base case") {
        const DenseMatrix m = materialize_tree_matrix(TreeShape{{-1}}, {0.5, 0.2, 0.3});
        REQUIRE(m.rows() == 1);
        CHECK(m(0, 0) == 0.5);
    }
    SUBCASE("chain of three") {
        const DenseMatrix m = materialize_tree_matrix(TreeShape{{-1, 0, 1}}, {0.5, 0.2, 0.3});
        const double expected[3][3] = {{0.5, 0, 0}, {0.3, 0.2, 0}, {0, 0.3, 0.2}};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == expected[i][j]);
        }
    }
    SUBCASE("star of three") {
        const DenseMatrix m = materialize_tree_matrix(TreeShape{{-1, 0, 0}}, {0.5, 0.2, 0.3});
        const double expected[3][3] = {{0.5, 0, 0}, {0.3, 0.2, 0}, {0.3, 0, 0.2}};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == expected[i][j]);
        }
    }
    SUBCASE("invalid shapes rejected") {
        CHECK(validate_shape(TreeShape{{-1, 2, 1}}).has_value());  // father ahead of agent
        CHECK(validate_shape(TreeShape{{0, 0}}).has_value());      // missing root sentinel
        CHECK_THROWS_AS(materialize_tree_matrix(TreeShape{{-1, 1}}, {0.5, 0.2, 0.3}),
                        std::invalid_argument);
    }
}

TEST_CASE("stochastic_completion pushes residual mass onto the diagonal") {
    const DenseMatrix m =
        stochastic_completion(materialize_tree_matrix(TreeShape{{-1, 0, 1}}, {0.5, 0.2, 0.3}));
    CHECK(is_row_stochastic(m, 1e-15));
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 1) == doctest::Approx(0.7));
    CHECK(m(1, 0) == 0.3);
}

TEST_CASE("sequence_depths") {
    SUBCASE("single chain equals its graph depth") {
        const TreeShape chain{{-1, 0, 1, 2}};
        const DepthProfile dp = sequence_depths({&chain, 1});
        CHECK(dp.depths == std::vector<int>{0, 1, 2, 3});
        CHECK(dp.depth() == 3);
    }
    SUBCASE("two depth-2 trees induce a depth-3 nesting") {
        const std::vector<TreeShape> shapes = {TreeShape{{-1, 0, 0, 2, 2}},
                                               TreeShape{{-1, 0, 1, 0, 1}}};
        const DepthProfile dp = sequence_depths(shapes);
        CHECK(dp.depths == std::vector<int>{0, 1, 2, 3, 3});
        CHECK(dp.depth() == 3);
        CHECK(oracles::bfs_tree_depth(shapes[0]) == 2);
        CHECK(oracles::bfs_tree_depth(shapes[1]) == 2);
    }
    SUBCASE("single star") {
        const TreeShape star{{-1, 0, 0, 0}};
        const DepthProfile dp = sequence_depths({&star, 1});
        CHECK(dp.depths == std::vector<int>{0, 1, 1, 1});
        CHECK(dp.depth() == 1);
    }
    SUBCASE("order of the shape list is irrelevant") {
        SplitMix64 rng(41);
        for (int rep = 0; rep < 50; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(12));
            std::vector<TreeShape> shapes;
            const int count = 1 + static_cast<int>(rng.next_below(4));
            for (int s = 0; s < count; ++s) shapes.push_back(random_shape(rng, n));
            const DepthProfile forward = sequence_depths(shapes);
            std::reverse(shapes.begin(), shapes.end());
            CHECK(sequence_depths(shapes).depths == forward.depths);
        }
    }
    SUBCASE("single-shape depth matches breadth-first traversal") {
        SplitMix64 rng(43);
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(20));
            const TreeShape s = random_shape(rng, n);
            CHECK(sequence_depths({&s, 1}).depth() == oracles::bfs_tree_depth(s));
        }
    }
    SUBCASE("sequence depth dominates each shape's own depth, within 1..n-1") {
        SplitMix64 rng(47);
        for (int rep = 0; rep < 50; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(10));
            std::vector<TreeShape> shapes;
            for (int s = 0; s < 3; ++s) shapes.push_back(random_shape(rng, n));
            const int depth = sequence_depths(shapes).depth();
            CHECK(depth >= 1);
            CHECK(depth <= n - 1);
            for (const TreeShape& s : shapes) {
                CHECK(depth >= sequence_depths({&s, 1}).depth());
            }
        }
    }
    SUBCASE("mismatched agent counts rejected") {
        const std::vector<TreeShape> shapes = {TreeShape{{-1, 0}}, TreeShape{{-1, 0, 1}}};
        CHECK_THROWS_AS(sequence_depths(shapes), std::invalid_argument);
    }
}

TEST_CASE("nested_sets") {
    SUBCASE("worked depth profile") {
        const NestedSets ns = nested_sets(DepthProfile{{0, 1, 2, 3, 3}});
        REQUIRE(ns.depth() == 3);
        CHECK(ns.members[0] == std::vector<int>{0});
        CHECK(ns.members[1] == std::vector<int>{0, 1});
        CHECK(ns.members[2] == std::vector<int>{0, 1, 2});
        CHECK(ns.members[3] == std::vector<int>{0, 1, 2, 3, 4});
    }
    SUBCASE("single agent") {
        const NestedSets ns = nested_sets(DepthProfile{{0}});
        CHECK(ns.depth() == 0);
        CHECK(ns.members[0] == std::vector<int>{0});
    }
    SUBCASE("star") {
        const NestedSets ns = nested_sets(DepthProfile{{0, 1, 1, 1}});
        REQUIRE(ns.depth() == 1);
        CHECK(ns.members[0] == std::vector<int>{0});
        CHECK(ns.members[1] == std::vector<int>{0, 1, 2, 3});
    }
    SUBCASE("strictly nested with the full set last") {
        SplitMix64 rng(53);
        for (int rep = 0; rep < 50; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(15));
            const TreeShape s = random_shape(rng, n);
            const NestedSets ns = nested_sets(sequence_depths({&s, 1}));
            CHECK(ns.members[0].size() == 1);
            for (std::size_t k = 1; k < ns.members.size(); ++k) {
                CHECK(ns.members[k].size() > ns.members[k - 1].size());
            }
            CHECK(static_cast<int>(ns.members.back().size()) == n);
        }
    }
}

TEST_CASE("check_assumption") {
    const TreeParams p{0.5, 0.2, 0.3};
    const TreeShape chain{{-1, 0, 1, 2}};
    const NestedSets ns = nested_sets(sequence_depths({&chain, 1}));

    SUBCASE("a completed tree matrix passes against its own structure") {
        const DenseMatrix a = stochastic_completion(materialize_tree_matrix(chain, p));
        CHECK(check_assumption(a, ns, p).ok());
    }
    SUBCASE("identity violates the upstream bound for every non-root agent") {
        const AssumptionReport r = check_assumption(DenseMatrix::identity(4), ns, p);
        REQUIRE(r.violations.size() == 3);
        for (const AssumptionViolation& v : r.violations) {
            CHECK(v.constraint == WeightConstraint::UpstreamWeight);
            CHECK(v.observed == 0.0);
            CHECK(v.required == 0.3);
        }
        CHECK(to_string(WeightConstraint::UpstreamWeight) == "upstream weight");
    }
    SUBCASE("a shaved root diagonal violates the root bound") {
        DenseMatrix a = stochastic_completion(materialize_tree_matrix(chain, p));
        a(0, 0) = p.alpha - 0.01;
        a(0, 1) = 1.0 - a(0, 0);  // keep the row stochastic
        const AssumptionReport r = check_assumption(a, ns, p);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].agent == 0);
        CHECK(r.violations[0].constraint == WeightConstraint::RootSelfWeight);
    }
    SUBCASE("non-stochastic input rejected") {
        DenseMatrix a = materialize_tree_matrix(chain, p);  // rows sum below 1
        CHECK_THROWS_AS(check_assumption(a, ns, p), std::invalid_argument);
    }
    SUBCASE("round trip over random shapes") {
        SplitMix64 rng(59);
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(12));
            const TreeShape s = random_shape(rng, n);
            const NestedSets sets = nested_sets(sequence_depths({&s, 1}));
            const DenseMatrix a = stochastic_completion(materialize_tree_matrix(s, p));
            CHECK(check_assumption(a, sets, p).ok());
        }
    }
}

TEST_CASE("shapes files") {
    SUBCASE("worked example") {
        std::istringstream in("1 1 3 3\n1 2 1 2\n");
        const std::vector<TreeShape> shapes = parse_shapes(in);
        REQUIRE(shapes.size() == 2);
        CHECK(shapes[0].fathers == std::vector<int>{-1, 0, 0, 2, 2});
        CHECK(shapes[1].fathers == std::vector<int>{-1, 0, 1, 0, 1});
    }
    SUBCASE("comments and blank lines are skipped") {
        std::istringstream in("# chain on four agents\n\n1 2 3\n");
        CHECK(parse_shapes(in).size() == 1);
    }
    SUBCASE("CRLF endings and indented comments parse") {
        std::istringstream in("  # two shapes\r\n1 1 3 3\r\n\r\n1 2 1 2\r\n");
        const std::vector<TreeShape> shapes = parse_shapes(in);
        REQUIRE(shapes.size() == 2);
        CHECK(shapes[0].fathers == std::vector<int>{-1, 0, 0, 2, 2});
    }
    SUBCASE("round trip is lossless") {
        SplitMix64 rng(61);
        for (int rep = 0; rep < 50; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(10));
            std::vector<TreeShape> shapes;
            for (int s = 0; s < 1 + static_cast<int>(rng.next_below(3)); ++s) {
                shapes.push_back(random_shape(rng, n));
            }
            std::ostringstream out;
            serialize_shapes(out, shapes);
            std::istringstream in(out.str());
            const std::vector<TreeShape> back = parse_shapes(in);
            REQUIRE(back.size() == shapes.size());
            for (std::size_t i = 0; i < shapes.size(); ++i) {
                CHECK(back[i].fathers == shapes[i].fathers);
            }
        }
    }
    SUBCASE("malformed input rejected") {
        std::istringstream bad_father("3 1 1\n");
        CHECK_THROWS_AS(parse_shapes(bad_father), std::runtime_error);
        std::istringstream bad_token("1 x\n");
        CHECK_THROWS_AS(parse_shapes(bad_token), std::runtime_error);
        std::istringstream empty("");
        CHECK_THROWS_AS(parse_shapes(empty), std::runtime_error);
        std::istringstream mismatch("1 1\n1\n");
        CHECK_THROWS_AS(parse_shapes(mismatch), std::runtime_error);
    }
}
