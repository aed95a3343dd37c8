#include <benchmark/benchmark.h>

#include "cusp/estimator.hpp"
#include "cusp/limit.hpp"
#include "cusp/model.hpp"
#include "cusp/parallel.hpp"
#include "cusp/sim.hpp"

namespace {

cusp::ModelParams reference() {
    return cusp::ModelParams(cusp::ModelSpec{1.0, 0.5, 1.0, 0.25, 0.5, 5.0, 2.0, {1.0, 3.0}});
}

// Range 0 is the replicate count, range 1 the thread count (0 = serial reference).
void BM_simulate(benchmark::State& state) {
    const auto p = reference();
    const auto n = static_cast<std::size_t>(state.range(0));
    const int threads = static_cast<int>(state.range(1));
    if (threads > 0) cusp::par::set_threads(threads);
    for (auto _ : state) {
        auto d = threads > 0 ? cusp::simulate(p, n, 1) : cusp::simulate_serial(p, n, 1);
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_pmle(benchmark::State& state) {
    const auto p = reference();
    const cusp::PooledEvents ev(cusp::simulate(p, static_cast<std::size_t>(state.range(0)), 2));
    const int threads = static_cast<int>(state.range(1));
    if (threads > 0) cusp::par::set_threads(threads);
    cusp::EstimatorOptions opts;
    opts.coarse_step = 0.01;
    for (auto _ : state) {
        auto r = threads > 0 ? cusp::pmle(p, ev, opts) : cusp::pmle_serial(p, ev, opts);
        benchmark::DoNotOptimize(r);
    }
}

void BM_limit_draws(benchmark::State& state) {
    const cusp::FbmSampler sampler(cusp::FbmGrid(6.0, 1.0 / 16.0, 0.75));
    const auto draws = static_cast<std::size_t>(state.range(0));
    const int threads = static_cast<int>(state.range(1));
    if (threads > 0) cusp::par::set_threads(threads);
    for (auto _ : state) {
        auto s = threads > 0 ? cusp::sample_limit_argmax(sampler, draws, 3)
                             : cusp::sample_limit_argmax_serial(sampler, draws, 3);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void thread_args(benchmark::internal::Benchmark* b, long size) {
    const long hw = cusp::par::max_threads();
    b->Args({size, 0});
    for (long t = 1; t <= hw; t *= 2) b->Args({size, t});
    if ((hw & (hw - 1)) != 0) b->Args({size, hw});
}

}  // namespace

BENCHMARK(BM_simulate)->Apply([](auto* b) { thread_args(b, 2000); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pmle)->Apply([](auto* b) { thread_args(b, 2000); })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_limit_draws)->Apply([](auto* b) { thread_args(b, 1000); })->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
