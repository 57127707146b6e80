// Serial reference vs the OpenMP trial loop at the default dimensions.
// The records are identical; only wall time differs.

#include "raqr/harness.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

raqr::ExperimentSpec bench_spec(int shots) {
    raqr::ExperimentSpec spec;
    spec.base.shots = shots;
    spec.trials = 4000;
    spec.validate();
    return spec;
}

void BM_TrialsSerial(benchmark::State& state) {
    const auto spec = bench_spec(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(raqr::run_trials_serial(spec, 0));
    state.SetItemsProcessed(state.iterations() * spec.trials);
}

void BM_TrialsOpenMP(benchmark::State& state) {
    const auto spec = bench_spec(static_cast<int>(state.range(0)));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(raqr::run_trials(spec, 0, workers));
    state.SetItemsProcessed(state.iterations() * spec.trials);
}

void worker_counts(benchmark::internal::Benchmark* b) {
    const int max = omp_get_max_threads();
    for (int shots : {1, 5, 12}) {
        for (int w = 1; w <= max; w *= 2) b->Args({shots, w});
        if ((max & (max - 1)) != 0) b->Args({shots, max});
    }
}

}  // namespace

BENCHMARK(BM_TrialsSerial)->Arg(1)->Arg(5)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TrialsOpenMP)->Apply(worker_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
