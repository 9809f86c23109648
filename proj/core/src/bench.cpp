#include "svx/bench.hpp"

#include "svx/errors.hpp"
#include "svx/metrics.hpp"
#include "svx/parallel.hpp"
#include "svx/rng.hpp"

namespace svx {

void BenchParams::validate() const {
    if (cases < 1) throw ParamError("bench needs at least one case");
    if (!(erosion >= 0.0)) throw ParamError("erosion radius must be >= 0");
    if (!(boundary_noise >= 0.0 && boundary_noise <= 1.0)) throw ParamError("boundary noise must be in [0, 1]");
    phantom.validate();
    refine.validate();
}

std::uint64_t corruption_seed(std::uint64_t bench_seed, int index, bool tc) {
    return CounterRng(bench_seed).split(2 * static_cast<std::uint64_t>(index) + (tc ? 1 : 0)).key();
}

namespace {

LabelMap make_seed(const LabelMap& gt, const BenchParams& p, std::uint64_t seed) {
    auto m = corrupt_seed(gt, CorruptionMode::Erode, p.erosion, seed);
    return corrupt_seed(m, CorruptionMode::BoundaryNoise, p.boundary_noise, seed);
}

bool subset(const LabelMap& a, const LabelMap& b) {
    const auto x = a.labels();
    const auto y = b.labels();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0 && y[i] == 0) return false;
    return true;
}

}  // namespace

BenchCase run_bench_case(const BenchParams& p, int index, BenchArtifacts* artifacts) {
    PhantomParams pp = p.phantom;
    pp.seed = p.seed + static_cast<std::uint64_t>(index);
    auto ph = generate_phantom(pp);
    auto seed_wt = make_seed(ph.wt, p, corruption_seed(p.seed, index, false));
    auto seed_tc = make_seed(ph.tc, p, corruption_seed(p.seed, index, true));

    ModalityRoles roles{phantom_channel::kT1, phantom_channel::kT1Gd, phantom_channel::kT2, phantom_channel::kFlair};
    auto res = refine_case(ph.volume, roles, seed_wt, seed_tc, p.refine);

    BenchCase c;
    c.index = index;
    c.phantom_seed = pp.seed;
    c.wt_voxels = ph.wt.foreground();
    c.tc_voxels = ph.tc.foreground();
    c.seed_wt_dsc = dsc(seed_wt, ph.wt);
    c.refined_wt_dsc = dsc(res.wt.mask, ph.wt);
    c.seed_tc_dsc = dsc(seed_tc, ph.tc);
    c.refined_tc_dsc = dsc(res.tc.mask, ph.tc);
    c.seed_wt_hd95 = hd95(seed_wt, ph.wt, ph.wt.spacing());
    c.refined_wt_hd95 = hd95(res.wt.mask, ph.wt, ph.wt.spacing());
    c.wt_supervoxels = res.wt.supervoxels;
    c.tc_supervoxels = res.tc.supervoxels;
    c.wt_merges = res.wt.log.size();
    c.tc_merges = res.tc.log.size();
    c.wt_passthrough = res.wt.status == RefineStatus::SeedPassthrough;
    c.tc_passthrough = res.tc.status == RefineStatus::SeedPassthrough;
    c.tc_in_wt = subset(res.tc.mask, res.wt.mask);

    if (artifacts) *artifacts = BenchArtifacts{std::move(ph), std::move(seed_wt), std::move(seed_tc), std::move(res)};
    return c;
}

BenchSummary run_bench(const BenchParams& p,
                       const std::function<void(const BenchCase&, const BenchArtifacts&)>& on_case) {
    p.validate();
    BenchSummary s;
    s.cases.resize(static_cast<std::size_t>(p.cases));
    parallel_for(s.cases.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (on_case) {
                BenchArtifacts art;
                s.cases[i] = run_bench_case(p, static_cast<int>(i), &art);
                on_case(s.cases[i], art);
            } else {
                s.cases[i] = run_bench_case(p, static_cast<int>(i));
            }
        }
    });

    const double n = static_cast<double>(s.cases.size());
    for (const auto& c : s.cases) {
        s.mean_seed_wt_dsc += c.seed_wt_dsc / n;
        s.mean_refined_wt_dsc += c.refined_wt_dsc / n;
        s.mean_seed_tc_dsc += c.seed_tc_dsc / n;
        s.mean_refined_tc_dsc += c.refined_tc_dsc / n;
        s.refined_wt_at_least_090 += c.refined_wt_dsc >= 0.90;
        s.wt_not_worse += c.refined_wt_dsc >= c.seed_wt_dsc;
        s.tc_not_worse += c.refined_tc_dsc >= c.seed_tc_dsc;
        s.tc_in_wt += c.tc_in_wt;
    }
    return s;
}

}  // namespace svx
