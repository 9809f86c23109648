#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "svx/phantom.hpp"
#include "svx/refine.hpp"

namespace svx {

/// End-to-end phantom suite: generate, corrupt the ground truth into seeds,
/// refine, score.
struct BenchParams {
    int cases = 20;
    std::uint64_t seed = 7;        ///< case i uses phantom seed `seed + i`
    double erosion = 2.0;          ///< seed erosion radius, voxels
    double boundary_noise = 0.1;   ///< flip probability for boundary voxels
    PhantomParams phantom;         ///< its seed field is overwritten per case
    RefineParams refine;
    void validate() const;
};

struct BenchCase {
    int index = 0;
    std::uint64_t phantom_seed = 0;
    std::uint64_t wt_voxels = 0;
    std::uint64_t tc_voxels = 0;
    double seed_wt_dsc = 0.0;
    double refined_wt_dsc = 0.0;
    double seed_tc_dsc = 0.0;
    double refined_tc_dsc = 0.0;
    double seed_wt_hd95 = 0.0;
    double refined_wt_hd95 = 0.0;
    std::size_t wt_supervoxels = 0;
    std::size_t tc_supervoxels = 0;
    std::size_t wt_merges = 0;
    std::size_t tc_merges = 0;
    bool wt_passthrough = false;
    bool tc_passthrough = false;
    bool tc_in_wt = false;
};

/// Everything a caller may want to render for one case.
struct BenchArtifacts {
    Phantom phantom;
    LabelMap seed_wt;
    LabelMap seed_tc;
    CaseResult result;
};

struct BenchSummary {
    std::vector<BenchCase> cases;  ///< ordered by index
    double mean_seed_wt_dsc = 0.0;
    double mean_refined_wt_dsc = 0.0;
    double mean_seed_tc_dsc = 0.0;
    double mean_refined_tc_dsc = 0.0;
    int refined_wt_at_least_090 = 0;
    int wt_not_worse = 0;
    int tc_not_worse = 0;
    int tc_in_wt = 0;
};

/// Seeds handed to the corruption of case `index`; WT and TC draw from
/// separate streams.
std::uint64_t corruption_seed(std::uint64_t bench_seed, int index, bool tc);

BenchCase run_bench_case(const BenchParams& p, int index, BenchArtifacts* artifacts = nullptr);

/// Cases run in parallel; `on_case` (may be empty) is called from worker
/// threads, once per case, in no particular order.
BenchSummary run_bench(const BenchParams& p,
                       const std::function<void(const BenchCase&, const BenchArtifacts&)>& on_case = {});

}  // namespace svx
