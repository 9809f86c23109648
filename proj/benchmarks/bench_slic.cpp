#include <benchmark/benchmark.h>

#include "svx/parallel.hpp"
#include "svx/phantom.hpp"
#include "svx/supervoxel.hpp"

namespace {

void BM_Slic(benchmark::State& state) {
    svx::PhantomParams pp;
    const int n = static_cast<int>(state.range(0));
    pp.dims = {n, n, n};
    pp.seed = 3;
    const auto ph = svx::generate_phantom(pp);
    svx::SlicParams p;
    p.channels = {svx::phantom_channel::kFlair};
    svx::ScopedThreadCount threads(static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(svx::slic(ph.volume, p));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(ph.volume.voxels()));
}
BENCHMARK(BM_Slic)->Args({32, 1})->Args({64, 1})->Args({64, 4})->Unit(benchmark::kMillisecond);

void BM_Phantom(benchmark::State& state) {
    svx::PhantomParams pp;
    for (auto _ : state) {
        benchmark::DoNotOptimize(svx::generate_phantom(pp));
        ++pp.seed;
    }
}
BENCHMARK(BM_Phantom)->Unit(benchmark::kMillisecond);

}  // namespace
