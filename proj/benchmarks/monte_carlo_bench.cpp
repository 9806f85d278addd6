#include <benchmark/benchmark.h>

#include "dualmean/presets.hpp"
#include "dualmean/simulation.hpp"

using namespace dualmean;

static void BM_DrawSrswor(benchmark::State& state) {
    StreamRng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(draw_srswor(5000, state.range(0), rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DrawSrswor)->Arg(500);

static void BM_MonteCarlo(benchmark::State& state) {
    const auto pop = generate_population(generator_preset("pop1", 20250810));
    MonteCarloConfig cfg;
    cfg.replications = state.range(0);
    cfg.n = 500;
    cfg.master_seed = 1;
    cfg.threads = static_cast<int>(state.range(1));
    cfg.estimators = default_estimators(pop.realized_params(cfg.n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_monte_carlo(pop, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Args({2000, 1})->Args({2000, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
