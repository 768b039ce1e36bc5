#include <benchmark/benchmark.h>

#include "treebound/dynamics.hpp"
#include "treebound/spectral.hpp"
#include "treebound/topology.hpp"

namespace {

using namespace treebound;

void BM_CharPolyEval(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const StarParams sp{0.3, 0.4};
    double s = 0.95;
    for (auto _ : state) {
        benchmark::DoNotOptimize(char_poly_eval(depth, sp, s));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CharPolyEval)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_RhoBound(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const StarParams sp{0.3, 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rho_bound(depth, sp).rho);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RhoBound)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_PowerIteration(benchmark::State& state) {
    const int depth = static_cast<int>(state.range(0));
    const DenseMatrix zeta = build_zeta(depth, StarParams{0.3, 0.4});
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_radius_power(zeta).value);
    }
}
BENCHMARK(BM_PowerIteration)->Arg(4)->Arg(16)->Arg(64);

void BM_RandomSystemMatrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TreeShape chain;
    chain.fathers.resize(static_cast<std::size_t>(n));
    chain.fathers[0] = -1;
    for (int i = 1; i < n; ++i) chain.fathers[static_cast<std::size_t>(i)] = i - 1;
    const NestedSets ns = nested_sets(sequence_depths({&chain, 1}));
    const TreeParams p{0.5, 0.2, 0.3};
    SplitMix64 rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(random_system_matrix(ns, p, rng, MatrixMode::Slack));
    }
}
BENCHMARK(BM_RandomSystemMatrix)->Arg(8)->Arg(32)->Arg(128);

void BM_SimulationRun(benchmark::State& state) {
    TreeShape chain;
    chain.fathers = {-1, 0, 1, 2, 3, 4};
    SimulationConfig cfg;
    cfg.nested = nested_sets(sequence_depths({&chain, 1}));
    cfg.params = TreeParams{0.5, 0.2, 0.3};
    cfg.horizon = static_cast<int>(state.range(0));
    cfg.seed = 11;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_simulation(cfg).steps());
    }
}
BENCHMARK(BM_SimulationRun)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
