#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "svx/errors.hpp"
#include "svx/metrics.hpp"
#include "svx/phantom.hpp"
#include "svx/rng.hpp"

using namespace svx;

TEST_CASE("counter rng") {
    const CounterRng r(42);
    CHECK(r.bits(0) == CounterRng(42).bits(0));
    CHECK(r.bits(0) != r.bits(1));
    CHECK(r.split(1).key() != r.split(2).key());
    CHECK(r.split(1).bits(5) == CounterRng(42).split(1).bits(5));
    // SplitMix64 reference value: first output for seed 0.
    CHECK(CounterRng(0).bits(0) == 0xE220A8397B1DCDAFULL);
    double sum = 0, sq = 0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform(i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double g = r.normal(i);
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / 20000) < 0.03);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
    CounterRng seq(9);
    CHECK(seq.next_bits() == CounterRng(9).bits(0));
    CHECK(seq.next_bits() == CounterRng(9).bits(1));
}

TEST_CASE("noiseless phantom has three levels per channel") {
    PhantomParams p;
    p.dims = {32, 32, 32};
    p.noise_sigma = 0.0;
    p.bias_amplitude = 0.0;
    const auto ph = generate_phantom(p);
    for (int c = 0; c < phantom_channel::kCount; ++c) {
        const std::set<float> want{static_cast<float>(p.background), static_cast<float>(p.background + p.contrast[c].edema),
                                   static_cast<float>(p.background + p.contrast[c].core)};
        for (std::size_t i = 0; i < ph.volume.voxels(); ++i) {
            const float x = ph.volume.channel(c)[i];
            CHECK(want.count(x) == 1);
            const float expect = ph.tc[i]   ? static_cast<float>(p.background + p.contrast[c].core)
                                 : ph.wt[i] ? static_cast<float>(p.background + p.contrast[c].edema)
                                            : static_cast<float>(p.background);
            if (x != expect) FAIL("voxel " << i << " channel " << c);
        }
    }
    CHECK(ph.tc.foreground() > 0);
    CHECK(ph.wt.foreground() > ph.tc.foreground());
}

TEST_CASE("phantom determinism and nesting") {
    PhantomParams p;
    p.dims = {24, 24, 20};
    for (std::uint64_t s = 0; s < 100; ++s) {
        p.seed = s;
        const auto a = generate_phantom(p);
        for (std::size_t i = 0; i < a.tc.voxels(); ++i)
            if (a.tc[i] && !a.wt[i]) FAIL("tc outside wt, seed " << s);
        if (s < 5) {
            const auto b = generate_phantom(p);
            CHECK(a.volume == b.volume);
            CHECK(a.wt == b.wt);
            CHECK(a.tc == b.tc);
        }
    }
    p.dims = {8, 64, 64};
    CHECK_THROWS_AS(generate_phantom(p), ParamError);
    p = {};
    p.noise_sigma = -1;
    CHECK_THROWS_AS(generate_phantom(p), ParamError);
}

TEST_CASE("corrupt_seed") {
    const Dims d{9, 9, 9};
    LabelMap cube(d);
    for (int z = 2; z < 7; ++z)
        for (int y = 2; y < 7; ++y)
            for (int x = 2; x < 7; ++x) cube[d.index(x, y, z)] = 1;

    for (auto mode : {CorruptionMode::Erode, CorruptionMode::Dilate, CorruptionMode::DropComponents, CorruptionMode::BoundaryNoise})
        CHECK(corrupt_seed(cube, mode, 0.0, 1) == cube);

    const auto eroded = corrupt_seed(cube, CorruptionMode::Erode, 1, 0);
    CHECK(eroded.foreground() == 27);
    for (int z = 3; z < 6; ++z)
        for (int y = 3; y < 6; ++y)
            for (int x = 3; x < 6; ++x) CHECK(eroded.at(x, y, z) == 1);

    const auto dilated = corrupt_seed(cube, CorruptionMode::Dilate, 1, 0);
    CHECK(dilated.foreground() == 125 + 6 * 25);

    CHECK_THROWS_AS(corrupt_seed(cube, CorruptionMode::Erode, 3, 0), EmptySeedError);
    CHECK_THROWS_AS(corrupt_seed(LabelMap(d), CorruptionMode::Dilate, 1, 0), EmptySeedError);
    CHECK_THROWS_AS(corrupt_seed(cube, CorruptionMode::Dilate, -1, 0), ParamError);
    CHECK(parse_corruption_mode("boundary_noise") == CorruptionMode::BoundaryNoise);
    CHECK(std::string(to_string(CorruptionMode::DropComponents)) == "drop_components");
    CHECK_THROWS_AS(parse_corruption_mode("blur"), ParamError);

    const auto n1 = corrupt_seed(cube, CorruptionMode::BoundaryNoise, 0.3, 5);
    CHECK(n1 == corrupt_seed(cube, CorruptionMode::BoundaryNoise, 0.3, 5));
    CHECK(n1 != cube);
    // Only voxels next to the boundary may change.
    for (int z = 0; z < 9; ++z)
        for (int y = 0; y < 9; ++y)
            for (int x = 0; x < 9; ++x) {
                const bool deep_in = x >= 3 && x < 6 && y >= 3 && y < 6 && z >= 3 && z < 6;
                const bool far_out = x < 1 || x > 7 || y < 1 || y > 7 || z < 1 || z > 7;
                if (deep_in) CHECK(n1.at(x, y, z) == 1);
                if (far_out) CHECK(n1.at(x, y, z) == 0);
            }
}

TEST_CASE("drop_components removes the smallest pieces first") {
    const Dims d{12, 3, 3};
    LabelMap m(d);
    for (int x = 0; x < 6; ++x) m[d.index(x, 1, 1)] = 1;  // 6 voxels
    m[d.index(8, 1, 1)] = 1;                               // 1 voxel
    m[d.index(10, 1, 1)] = 1;
    m[d.index(11, 1, 1)] = 1;  // 2 voxels
    const auto one = corrupt_seed(m, CorruptionMode::DropComponents, 0.15, 0);
    CHECK(one.foreground() == 8);
    CHECK(one.at(8, 1, 1) == 0);
    const auto two = corrupt_seed(m, CorruptionMode::DropComponents, 0.4, 0);
    CHECK(two.foreground() == 6);
}

TEST_CASE("erosion lowers the dice monotonically") {
    PhantomParams p;
    p.dims = {40, 40, 40};
    for (std::uint64_t s = 0; s < 3; ++s) {
        p.seed = s;
        const auto ph = generate_phantom(p);
        double last = 1.0;
        for (int r = 1; r <= 3; ++r) {
            const double d = dsc(corrupt_seed(ph.wt, CorruptionMode::Erode, r, 0), ph.wt);
            CHECK(d < last);
            last = d;
        }
    }
}
