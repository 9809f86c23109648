#include <benchmark/benchmark.h>

#include "svx/metrics.hpp"
#include "svx/phantom.hpp"

namespace {

void BM_Hd95(benchmark::State& state) {
    svx::PhantomParams pp;
    const int n = static_cast<int>(state.range(0));
    pp.dims = {n, n, n};
    const auto ph = svx::generate_phantom(pp);
    const auto pred = svx::corrupt_seed(ph.wt, svx::CorruptionMode::BoundaryNoise, 0.2, 1);
    for (auto _ : state) benchmark::DoNotOptimize(svx::hd95(pred, ph.wt, ph.wt.spacing()));
}
BENCHMARK(BM_Hd95)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Dsc(benchmark::State& state) {
    svx::PhantomParams pp;
    const auto ph = svx::generate_phantom(pp);
    for (auto _ : state) benchmark::DoNotOptimize(svx::dsc(ph.tc, ph.wt));
}
BENCHMARK(BM_Dsc);

}  // namespace
