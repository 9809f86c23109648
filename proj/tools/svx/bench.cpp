#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>

#include "cli.hpp"
#include "svx/bench.hpp"
#include "svx/errors.hpp"

namespace svx::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kZoom = 4;
constexpr Rgb kGt{40, 220, 60};
constexpr Rgb kSeed{240, 200, 30};
constexpr Rgb kRefined{230, 40, 40};

// Grey slice of one channel with contours of the three masks drawn on top.
void draw_panel(Canvas& c, int x0, const Volume& v, int channel, int z, const LabelMap& gt, const LabelMap& seed,
                const LabelMap& refined) {
    const Dims& d = v.dims();
    const auto ch = v.channel(channel);
    float lo = ch[d.index(0, 0, z)], hi = lo;
    for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
            lo = std::min(lo, ch[d.index(x, y, z)]);
            hi = std::max(hi, ch[d.index(x, y, z)]);
        }
    const float span = hi > lo ? hi - lo : 1.0f;
    for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x) {
            const auto g = static_cast<std::uint8_t>(std::clamp((ch[d.index(x, y, z)] - lo) / span, 0.0f, 1.0f) * 255.0f);
            for (int j = 0; j < kZoom; ++j)
                for (int i = 0; i < kZoom; ++i) c.set(x0 + x * kZoom + i, y * kZoom + j, {g, g, g});
        }
    // contour = in-mask pixel with an out-of-mask 4-neighbour in the slice;
    // drawn on the zoomed pixel's edge facing that neighbour
    auto contour = [&](const LabelMap& m, Rgb col) {
        auto in = [&](int x, int y) { return d.contains(x, y, z) && m.at(x, y, z) != 0; };
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                if (!in(x, y)) continue;
                const int px = x0 + x * kZoom, py = y * kZoom;
                if (!in(x - 1, y))
                    for (int j = 0; j < kZoom; ++j) c.set(px, py + j, col);
                if (!in(x + 1, y))
                    for (int j = 0; j < kZoom; ++j) c.set(px + kZoom - 1, py + j, col);
                if (!in(x, y - 1))
                    for (int i = 0; i < kZoom; ++i) c.set(px + i, py, col);
                if (!in(x, y + 1))
                    for (int i = 0; i < kZoom; ++i) c.set(px + i, py + kZoom - 1, col);
            }
    };
    contour(gt, kGt);
    contour(seed, kSeed);
    contour(refined, kRefined);
}

void write_overlay(const fs::path& path, const BenchArtifacts& a) {
    const Dims& d = a.phantom.volume.dims();
    const int z = d.nz / 2;
    const int gap = 8;
    Canvas c(2 * d.nx * kZoom + gap, d.ny * kZoom);
    draw_panel(c, 0, a.phantom.volume, phantom_channel::kFlair, z, a.phantom.wt, a.seed_wt, a.result.wt.mask);
    draw_panel(c, d.nx * kZoom + gap, a.phantom.volume, phantom_channel::kT1Gd, z, a.phantom.tc, a.seed_tc, a.result.tc.mask);
    c.write_png(path);
}

const char* status(bool passthrough) { return passthrough ? "seed_passthrough" : "refined"; }

json summary_json(const BenchParams& p, const BenchSummary& s) {
    json cases = json::array();
    for (const auto& c : s.cases)
        cases.push_back({{"case", c.index},
                         {"phantom_seed", c.phantom_seed},
                         {"wt_voxels", c.wt_voxels},
                         {"tc_voxels", c.tc_voxels},
                         {"seed_wt_dsc", c.seed_wt_dsc},
                         {"refined_wt_dsc", c.refined_wt_dsc},
                         {"seed_tc_dsc", c.seed_tc_dsc},
                         {"refined_tc_dsc", c.refined_tc_dsc},
                         {"seed_wt_hd95_mm", c.seed_wt_hd95},
                         {"refined_wt_hd95_mm", c.refined_wt_hd95},
                         {"wt_supervoxels", c.wt_supervoxels},
                         {"tc_supervoxels", c.tc_supervoxels},
                         {"wt_merges", c.wt_merges},
                         {"tc_merges", c.tc_merges},
                         {"wt_status", status(c.wt_passthrough)},
                         {"tc_status", status(c.tc_passthrough)},
                         {"tc_in_wt", c.tc_in_wt}});
    const auto& r = p.refine;
    const json params{{"cases", p.cases},
                      {"seed", p.seed},
                      {"erode", p.erosion},
                      {"boundary_noise", p.boundary_noise},
                      {"noise", p.phantom.noise_sigma},
                      {"bias", p.phantom.bias_amplitude},
                      {"dims", json::array({p.phantom.dims.nx, p.phantom.dims.ny, p.phantom.dims.nz})},
                      {"sim0", r.similarity.sim0},
                      {"nc", r.n_c},
                      {"lambda", r.similarity.lambda},
                      {"tau", r.similarity.tau ? json(*r.similarity.tau) : json("auto")},
                      {"fit_threshold", r.fit_threshold},
                      {"n_segments", r.slic.n_segments},
                      {"compactness", r.slic.compactness},
                      {"sigma", r.slic.sigma}};
    const json summary{{"mean_seed_wt_dsc", s.mean_seed_wt_dsc},
                       {"mean_refined_wt_dsc", s.mean_refined_wt_dsc},
                       {"mean_seed_tc_dsc", s.mean_seed_tc_dsc},
                       {"mean_refined_tc_dsc", s.mean_refined_tc_dsc},
                       {"wt_gain", s.mean_refined_wt_dsc - s.mean_seed_wt_dsc},
                       {"tc_gain", s.mean_refined_tc_dsc - s.mean_seed_tc_dsc},
                       {"refined_wt_at_least_090", s.refined_wt_at_least_090},
                       {"wt_not_worse", s.wt_not_worse},
                       {"tc_not_worse", s.tc_not_worse},
                       {"tc_in_wt", s.tc_in_wt}};
    return {{"schema", "svx-bench/1"}, {"params", params}, {"cases", cases}, {"summary", summary}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void run_bench_command(const BenchParams& p, const std::string& out_dir, bool overlays, bool as_json) {
    p.validate();
    const bool files = !out_dir.empty();
    if (files) fs::create_directories(out_dir);

    std::function<void(const BenchCase&, const BenchArtifacts&)> on_case;
    if (files && overlays) {
        on_case = [&](const BenchCase& c, const BenchArtifacts& a) {
            char name[32];
            std::snprintf(name, sizeof name, "case_%03d.png", c.index);
            write_overlay(fs::path(out_dir) / name, a);
        };
    }
    const auto s = run_bench(p, on_case);
    const json j = summary_json(p, s);

    if (files) {
        write_text(fs::path(out_dir) / "summary.json", j.dump(2) + "\n");
        std::string csv =
            "case,phantom_seed,seed_wt_dsc,refined_wt_dsc,seed_tc_dsc,refined_tc_dsc,seed_wt_hd95_mm,refined_wt_hd95_mm,"
            "wt_merges,tc_merges\n";
        char line[256];
        for (const auto& c : s.cases) {
            std::snprintf(line, sizeof line, "%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n", c.index,
                          static_cast<unsigned long long>(c.phantom_seed), c.seed_wt_dsc, c.refined_wt_dsc, c.seed_tc_dsc,
                          c.refined_tc_dsc, c.seed_wt_hd95, c.refined_wt_hd95, c.wt_merges, c.tc_merges);
            csv += line;
        }
        write_text(fs::path(out_dir) / "cases.csv", csv);
    }

    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::printf("case  seed   WT seed  WT refined  TC seed  TC refined  merges\n");
    for (const auto& c : s.cases)
        std::printf("%4d  %4llu   %7.4f  %10.4f  %7.4f  %10.4f  %3zu/%zu\n", c.index,
                    static_cast<unsigned long long>(c.phantom_seed), c.seed_wt_dsc, c.refined_wt_dsc, c.seed_tc_dsc,
                    c.refined_tc_dsc, c.wt_merges, c.tc_merges);
    std::printf("mean         %7.4f  %10.4f  %7.4f  %10.4f\n", s.mean_seed_wt_dsc, s.mean_refined_wt_dsc,
                s.mean_seed_tc_dsc, s.mean_refined_tc_dsc);
    std::printf("refined WT DSC >= 0.90 in %d/%zu cases; TC inside WT in %d/%zu\n", s.refined_wt_at_least_090,
                s.cases.size(), s.tc_in_wt, s.cases.size());
}

}  // namespace svx::cli
