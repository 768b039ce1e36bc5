#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treebound/dynamics.hpp"
#include "treebound/spectral.hpp"

using namespace treebound;

namespace {

NestedSets chain_sets(int n) {
    TreeShape s;
    s.fathers.resize(static_cast<std::size_t>(n));
    s.fathers[0] = -1;
    for (int i = 1; i < n; ++i) s.fathers[static_cast<std::size_t>(i)] = i - 1;
    return nested_sets(sequence_depths({&s, 1}));
}

NestedSets random_sets(SplitMix64& rng, int n, int max_depth) {
    DepthProfile dp;
    dp.depths.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> eligible{0};
    for (int i = 1; i < n; ++i) {
        const int father = eligible[rng.next_below(eligible.size())];
        dp.depths[static_cast<std::size_t>(i)] = dp.depths[static_cast<std::size_t>(father)] + 1;
        if (dp.depths[static_cast<std::size_t>(i)] < max_depth) eligible.push_back(i);
    }
    return nested_sets(dp);
}

}  // namespace

TEST_CASE("random_system_matrix") {
    SUBCASE("alpha = 1 pins the root row to its own state") {
        SplitMix64 rng(3);
        const NestedSets ns = chain_sets(5);
        const DenseMatrix a = random_system_matrix(ns, {1.0, 0.2, 0.3}, rng, MatrixMode::Tight);
        CHECK(a(0, 0) == 1.0);
        for (std::size_t j = 1; j < 5; ++j) CHECK(a(0, j) == 0.0);
    }
    SUBCASE("beta = 0, gamma = 1 exhausts each non-root row on a father column") {
        SplitMix64 rng(5);
        const NestedSets ns = chain_sets(5);
        const DenseMatrix a = random_system_matrix(ns, {0.4, 0.0, 1.0}, rng, MatrixMode::Tight);
        for (std::size_t i = 1; i < 5; ++i) {
            int ones = 0;
            for (std::size_t j = 0; j < 5; ++j) {
                if (a(i, j) == 1.0) {
                    ++ones;
                    CHECK(ns.depths[j] < ns.depths[i]);
                } else {
                    CHECK(a(i, j) == 0.0);
                }
            }
            CHECK(ones == 1);
        }
    }
    SUBCASE("every draw passes the assumption checker, both modes") {
        SplitMix64 rng(7);
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_below(20));
            const NestedSets ns = random_sets(rng, n, 6);
            const double alpha = rng.next_unit();
            const double beta = rng.next_unit() * 0.8;
            const double gamma = rng.next_unit() * (1.0 - beta);
            const TreeParams p{alpha, beta, gamma};
            const MatrixMode mode = rep % 2 == 0 ? MatrixMode::Tight : MatrixMode::Slack;
            const DenseMatrix a = random_system_matrix(ns, p, rng, mode);
            CHECK(is_row_stochastic(a, 1e-12));
            CHECK(check_assumption(a, ns, p).ok());
        }
    }
}

TEST_CASE("step") {
    SUBCASE("identity") {
        const std::vector<double> x{3.0, 1.0, 2.0};
        CHECK(step(DenseMatrix::identity(3), x) == x);
    }
    SUBCASE("uniform averaging reaches the mean in one step") {
        DenseMatrix a(4, 4, 0.25);
        const std::vector<double> x{1.0, 2.0, 3.0, 6.0};
        for (double v : step(a, x)) CHECK(v == doctest::Approx(3.0));
    }
    SUBCASE("the cycle witness acts as a cyclic shift") {
        const DenseMatrix a = extremal_system(ExtremalKind::Cycle, 4, 0.0);
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
        CHECK(step(a, x) == std::vector<double>{4.0, 1.0, 2.0, 3.0});
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(step(DenseMatrix::identity(3), std::vector<double>{1.0, 2.0}),
                        std::invalid_argument);
    }
    SUBCASE("stochastic averaging never widens the state range") {
        SplitMix64 rng(11);
        const NestedSets ns = chain_sets(8);
        const TreeParams p{0.6, 0.1, 0.2};
        std::vector<double> x(8);
        for (double& v : x) v = rng.next_unit() * 10.0 - 5.0;
        for (int t = 0; t < 50; ++t) {
            const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
            const double mn = *mn_it, mx = *mx_it;
            x = step(random_system_matrix(ns, p, rng, MatrixMode::Slack), x);
            for (double v : x) {
                CHECK(v <= mx + 1e-12);
                CHECK(v >= mn - 1e-12);
            }
        }
    }
}

TEST_CASE("diameter_vector") {
    const NestedSets ns = nested_sets(DepthProfile{{0, 1, 2, 3, 3}});
    SUBCASE("constant state gives the zero vector") {
        const std::vector<double> delta =
            diameter_vector(std::vector<double>{2.0, 2.0, 2.0, 2.0, 2.0}, ns);
        for (double v : delta) CHECK(v == 0.0);
    }
    SUBCASE("worked values on the two-tree nesting") {
        const std::vector<double> delta =
            diameter_vector(std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0}, ns);
        CHECK(delta == std::vector<double>{0.0, 1.0, 2.0, 4.0});
    }
    SUBCASE("range lands in the last entry") {
        const std::vector<double> delta =
            diameter_vector(std::vector<double>{5.0, 0.0, 0.0, 0.0, 0.0}, ns);
        CHECK(delta[0] == 0.0);
        CHECK(delta.back() == 5.0);
    }
    SUBCASE("entries are nondecreasing along the nesting") {
        SplitMix64 rng(13);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> x(5);
            for (double& v : x) v = rng.next_unit();
            const std::vector<double> delta = diameter_vector(x, ns);
            CHECK(delta[0] == 0.0);
            for (std::size_t k = 1; k < delta.size(); ++k) CHECK(delta[k] >= delta[k - 1]);
        }
    }
}

TEST_CASE("run_simulation") {
    SUBCASE("horizon below 1 rejected") {
        SimulationConfig cfg;
        cfg.nested = chain_sets(4);
        cfg.params = TreeParams{0.5, 0.2, 0.3};
        cfg.horizon = 0;
        CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
    }
    SUBCASE("identical configs give bit-identical trajectories") {
        SimulationConfig cfg;
        cfg.nested = chain_sets(6);
        cfg.params = TreeParams{0.5, 0.2, 0.3};
        cfg.horizon = 60;
        cfg.seed = 99;
        cfg.mode = MatrixMode::Slack;
        cfg.initial = InitialCondition::RandomUniform;
        const Trajectory a = run_simulation(cfg);
        const Trajectory b = run_simulation(cfg);
        CHECK(a.states == b.states);
        CHECK(a.diameters == b.diameters);
        cfg.seed = 100;
        CHECK(run_simulation(cfg).states != a.states);
    }
    SUBCASE("per-step comparison holds along compliant trajectories") {
        SplitMix64 seeds(17);
        for (int rep = 0; rep < 20; ++rep) {
            SimulationConfig cfg;
            cfg.nested = chain_sets(5);
            cfg.params = TreeParams{0.5, 0.2, 0.3};
            cfg.horizon = 100;
            cfg.seed = seeds.next_u64();
            cfg.mode = rep % 2 == 0 ? MatrixMode::Tight : MatrixMode::Slack;
            const Trajectory traj = run_simulation(cfg);
            const DenseMatrix comparison =
                build_comparison_matrix(cfg.nested.depth(), star_params(cfg.params));
            CHECK(!first_comparison_violation(traj, comparison).has_value());
        }
    }
}

TEST_CASE("run_stationary on the extremal witnesses") {
    const NestedSets ns = chain_sets(6);
    std::vector<double> x0(6, 1.0);
    x0[0] = 0.0;

    SUBCASE("identity keeps every diameter constant") {
        const Trajectory traj =
            run_stationary(extremal_system(ExtremalKind::Identity, 6), ns, x0, 50);
        for (const auto& delta : traj.diameters) CHECK(delta == traj.diameters.front());
        CHECK(empirical_rate(traj, 5) == 1.0);
    }
    SUBCASE("cycle never shrinks the full diameter") {
        const Trajectory traj =
            run_stationary(extremal_system(ExtremalKind::Cycle, 6), ns, x0, 50);
        for (const auto& delta : traj.diameters) CHECK(delta.back() == 1.0);
        CHECK(empirical_rate(traj, 5) == 1.0);
    }
    SUBCASE("leader chain contracts at beta") {
        const Trajectory traj =
            run_stationary(extremal_system(ExtremalKind::LeaderChain, 6, 0.5), ns, x0, 500);
        CHECK(std::abs(empirical_rate(traj, 50) - 0.5) < 1e-3);
    }
}

TEST_CASE("empirical_rate") {
    const NestedSets ns = chain_sets(4);
    std::vector<double> x0{0.0, 1.0, 1.0, 1.0};

    SUBCASE("uniform averaging collapses to the consensus marker") {
        const Trajectory traj = run_stationary(DenseMatrix(4, 4, 0.25), ns, x0, 30);
        CHECK(empirical_rate(traj, 0) == 0.0);
    }
    SUBCASE("window bounds are enforced") {
        const Trajectory traj =
            run_stationary(extremal_system(ExtremalKind::Identity, 4), ns, x0, 20);
        CHECK_THROWS_AS(empirical_rate(traj, 10), std::invalid_argument);
        CHECK_THROWS_AS(empirical_rate(traj, -1), std::invalid_argument);
        CHECK(empirical_rate(traj, 9) == 1.0);
    }
    SUBCASE("zero initial diameter rejected") {
        const std::vector<double> flat(4, 1.0);
        const Trajectory traj =
            run_stationary(extremal_system(ExtremalKind::Identity, 4), ns, flat, 20);
        CHECK_THROWS_AS(empirical_rate(traj, 0), std::invalid_argument);
    }
    SUBCASE("pure geometric decay is recovered to high accuracy") {
        Trajectory traj;
        double d = 1.0;
        for (int t = 0; t <= 200; ++t) {
            traj.states.push_back({0.0, d});
            traj.diameters.push_back({0.0, d});
            d *= 0.8;
        }
        CHECK(empirical_rate(traj, 20) == doctest::Approx(0.8).epsilon(1e-10));
    }
    SUBCASE("a rounding-noise tail does not bend the fit") {
        // decay to the spread of O(1) states, then a flat noise plateau
        Trajectory traj;
        double d = 1.0;
        for (int t = 0; t <= 200; ++t) {
            traj.states.push_back({1.0, 1.0 + d});
            traj.diameters.push_back({0.0, d});
            d = std::max(d * 0.5, 1e-16);
        }
        const double rate = empirical_rate(traj, 5);
        CHECK(rate == doctest::Approx(0.5).epsilon(1e-2));
    }
    SUBCASE("a diameter already at the noise floor reads as consensus") {
        Trajectory traj;
        for (int t = 0; t <= 50; ++t) {
            traj.states.push_back({1.0, 1.0 + 1e-16});
            traj.diameters.push_back({0.0, 1e-16});
        }
        CHECK(empirical_rate(traj, 0) == 0.0);
    }
}

TEST_CASE("verify_comparison_step") {
    const DenseMatrix c = build_comparison_matrix(2, {0.25, 0.25});
    SUBCASE("consensus fixed point") {
        const std::vector<double> zero(3, 0.0);
        CHECK(verify_comparison_step(zero, zero, c));
    }
    SUBCASE("fabricated violation") {
        const std::vector<double> prev{0.0, 0.5, 1.0};
        std::vector<double> next = c.apply(prev);
        CHECK(verify_comparison_step(prev, next, c));
        next[1] += 1e-6;
        CHECK(!verify_comparison_step(prev, next, c));
    }
    SUBCASE("dimension mismatch") {
        const std::vector<double> prev{0.0, 0.5};
        CHECK_THROWS_AS(verify_comparison_step(prev, prev, c), std::invalid_argument);
    }
}

TEST_CASE("extremal_system") {
    SUBCASE("identity") {
        CHECK(extremal_system(ExtremalKind::Identity, 3) == DenseMatrix::identity(3));
    }
    SUBCASE("cycle on three agents") {
        const DenseMatrix m = extremal_system(ExtremalKind::Cycle, 3);
        const double expected[3][3] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == expected[i][j]);
        }
    }
    SUBCASE("leader chain at beta = 0.5") {
        const DenseMatrix m = extremal_system(ExtremalKind::LeaderChain, 3, 0.5);
        const double expected[3][3] = {{1, 0, 0}, {0.5, 0.5, 0}, {0, 0.5, 0.5}};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == expected[i][j]);
        }
    }
    SUBCASE("all witnesses are row-stochastic") {
        for (int n : {2, 5, 9}) {
            CHECK(is_row_stochastic(extremal_system(ExtremalKind::Identity, n)));
            CHECK(is_row_stochastic(extremal_system(ExtremalKind::Cycle, n)));
            CHECK(is_row_stochastic(extremal_system(ExtremalKind::LeaderChain, n, 0.3)));
        }
    }
    SUBCASE("tiny systems rejected") {
        CHECK_THROWS_AS(extremal_system(ExtremalKind::Cycle, 1), std::invalid_argument);
    }
}

TEST_CASE("trajectory CSV") {
    const NestedSets ns = chain_sets(3);
    const std::vector<double> x0{0.0, 1.0, 1.0};
    const Trajectory traj =
        run_stationary(extremal_system(ExtremalKind::LeaderChain, 3, 0.5), ns, x0, 2);
    std::ostringstream out;
    write_trajectory_csv(out, traj, 0.5);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,delta_1,delta_2,delta_3,rate_estimate");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) {
        ++rows;
        CHECK(std::count(row.begin(), row.end(), ',') == 4);
    }
    CHECK(rows == 3);
}

TEST_CASE("trajectory CSV parses back bit-exactly") {
    SimulationConfig cfg;
    cfg.nested = chain_sets(5);
    cfg.params = TreeParams{0.6, 0.1, 0.2};
    cfg.horizon = 40;
    cfg.seed = 314;
    cfg.mode = MatrixMode::Slack;
    const Trajectory traj = run_simulation(cfg);
    const double rate = empirical_rate(traj, 4);

    std::ostringstream out;
    write_trajectory_csv(out, traj, rate);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    int t = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        CHECK(std::stoi(cell) == t);
        for (double expected : traj.diameters[static_cast<std::size_t>(t)]) {
            REQUIRE(std::getline(cells, cell, ','));
            CHECK(std::stod(cell) == expected);
        }
        REQUIRE(std::getline(cells, cell, ','));
        CHECK(std::stod(cell) == rate);
        ++t;
    }
    CHECK(t == traj.steps() + 1);
}
