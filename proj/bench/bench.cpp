// Serial reference vs OpenMP engine for the two parallel kernels.
#include <benchmark/benchmark.h>

#include "bcross/analytics.hpp"
#include "bcross/montecarlo.hpp"

namespace {

using bcross::BarrierSpec;

void mc_crossing(benchmark::State& state, bcross::McEngine engine) {
    const auto spec = BarrierSpec::sqrt_remaining(1.0, 1.0, 1.0);
    bcross::McConfig cfg;
    cfg.paths = static_cast<std::uint64_t>(state.range(0));
    cfg.steps = 1024;
    cfg.engine = engine;
    for (auto _ : state) benchmark::DoNotOptimize(bcross::mc_crossing(spec, cfg).estimate);
    state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.steps);
    state.counters["threads"] = bcross::mc_thread_count(cfg);
}

void BM_McSerial(benchmark::State& s) { mc_crossing(s, bcross::McEngine::serial); }
void BM_McOpenMP(benchmark::State& s) { mc_crossing(s, bcross::McEngine::openmp); }
BENCHMARK(BM_McSerial)->Arg(16384)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McOpenMP)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_TabulateSerial(benchmark::State& state) {
    const auto spec = BarrierSpec::two_sided_constant(1.0, -1.0, 1.0);
    bcross::GridOptions g;
    g.points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bcross::tabulate_serial(spec, bcross::DensityKind::sigma, g).pdf.data());
}
void BM_TabulateOpenMP(benchmark::State& state) {
    const auto spec = BarrierSpec::two_sided_constant(1.0, -1.0, 1.0);
    bcross::GridOptions g;
    g.points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bcross::tabulate(spec, bcross::DensityKind::sigma, g).pdf.data());
}
BENCHMARK(BM_TabulateSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TabulateOpenMP)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
