#include <benchmark/benchmark.h>

#include "svx/features.hpp"
#include "svx/phantom.hpp"
#include "svx/rag.hpp"
#include "svx/refine.hpp"
#include "svx/supervoxel.hpp"

namespace {

struct Scene {
    svx::Phantom ph;
    svx::LabelMap sp;
};

const Scene& scene() {
    static const Scene s = [] {
        svx::PhantomParams pp;
        pp.seed = 5;
        auto ph = svx::generate_phantom(pp);
        svx::SlicParams p;
        p.channels = {svx::phantom_channel::kFlair};
        auto sp = svx::slic(ph.volume, p);
        return Scene{std::move(ph), std::move(sp)};
    }();
    return s;
}

void BM_ExtractFeatures(benchmark::State& state) {
    const auto& s = scene();
    std::vector<int> channels;
    for (int c = 0; c < state.range(0); ++c) channels.push_back(c);
    for (auto _ : state) benchmark::DoNotOptimize(svx::extract_features(s.ph.volume, s.sp, channels));
}
BENCHMARK(BM_ExtractFeatures)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BuildRag(benchmark::State& state) {
    const auto& s = scene();
    for (auto _ : state) benchmark::DoNotOptimize(svx::build_rag(s.sp));
}
BENCHMARK(BM_BuildRag)->Unit(benchmark::kMillisecond);

void BM_RefineOnSupervoxels(benchmark::State& state) {
    const auto& s = scene();
    svx::RefineParams p;
    p.slic.channels = {svx::phantom_channel::kFlair};
    p.feature_channels = {svx::phantom_channel::kT1Gd, svx::phantom_channel::kT2, svx::phantom_channel::kFlair};
    const auto seed = svx::corrupt_seed(s.ph.wt, svx::CorruptionMode::Erode, 2, 0);
    for (auto _ : state) benchmark::DoNotOptimize(svx::refine_on_supervoxels(s.ph.volume, s.sp, seed, p));
}
BENCHMARK(BM_RefineOnSupervoxels)->Unit(benchmark::kMillisecond);

}  // namespace
