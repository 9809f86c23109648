#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "svx/errors.hpp"
#include "svx/similarity.hpp"

using namespace svx;

TEST_CASE("ward_distance") {
    const std::vector<double> a{1.0, 2.0, 3.0}, b{1.0, 2.0, 4.0};
    CHECK(ward_distance(a, 5, a, 9) == 0.0);
    CHECK(ward_distance(a, 1, b, 1) == 0.5);
    CHECK(ward_distance(a, 3, b, 6) == ward_distance(b, 6, a, 3));
    CHECK_THROWS_AS(ward_distance(a, 0, b, 1), ParamError);
    CHECK_THROWS_AS(ward_distance(a, 1, std::vector<double>{1.0}, 1), ParamError);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::uniform_int_distribution<std::uint64_t> n(1, 500);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(36), y(36);
        for (auto& v : x) v = g(rng);
        for (auto& v : y) v = g(rng);
        const auto na = n(rng), nb = n(rng);
        CHECK(oracle::close(ward_distance(x, na, y, nb), oracle::ward(x, na, y, nb)));
        // Permuting dimensions changes nothing.
        std::vector<std::size_t> perm(36);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> px(36), py(36);
        for (int k = 0; k < 36; ++k) {
            px[k] = x[perm[k]];
            py[k] = y[perm[k]];
        }
        CHECK(oracle::close(ward_distance(px, na, py, nb), ward_distance(x, na, y, nb)));
    }
}

TEST_CASE("content_similarity") {
    CHECK(content_similarity(0.0, 2.0) == 1.0);
    CHECK(content_similarity(2.0, 2.0) == doctest::Approx(0.36787944117));
    CHECK_THROWS_AS(content_similarity(1.0, 0.0), ParamError);
    double last = 1.0;
    for (double w = 0.0; w < 10.0; w += 0.37) {
        const double s = content_similarity(w, 1.3);
        CHECK(s <= last);
        CHECK(s > 0.0);
        last = s;
    }
}

namespace {

// 3x3x1 map with one centre supervoxel enclosed by a ring of four others.
LabelMap ring() {
    return LabelMap(Dims{3, 3, 3}, std::vector<std::uint32_t>{
                                       1, 1, 2, 1, 1, 2, 3, 3, 2,  //
                                       1, 4, 2, 1, 0, 2, 3, 3, 4,  //
                                       4, 4, 2, 4, 4, 2, 3, 3, 4,
                                   });
}

}  // namespace

TEST_CASE("border_similarity") {
    // Centre voxel 0 is enclosed: every one of its 6 faces is shared.
    const auto sp = ring();
    const auto rag = build_rag(sp);
    const std::uint32_t others[] = {1, 2, 3, 4};
    CHECK(border_similarity(rag, others, 0) == 1.0);
    const std::uint32_t one[] = {1};
    for (std::uint32_t a = 0; a < rag.size(); ++a)
        for (std::uint32_t c = 0; c < rag.size(); ++c) {
            const std::uint32_t m[] = {a};
            if (a != c && rag.shared_faces(a, c) == 0) CHECK(border_similarity(rag, m, c) == 0.0);
        }
    const double b = border_similarity(rag, one, 0);
    CHECK(b == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("model: auto tau, composition and range") {
    std::mt19937_64 rng(6);
    const auto v = oracle::random_volume(rng, Dims{10, 9, 8}, 2);
    const auto sp = oracle::random_labels(rng, v.dims(), 3, 10);
    const auto table = extract_features(v, sp, std::vector<int>{0, 1});
    const auto rag = build_rag(sp);

    std::vector<double> w;
    for (std::uint32_t a = 0; a < rag.size(); ++a)
        for (const auto& e : rag.neighbours(a))
            if (a < e.neighbour)
                w.push_back(oracle::ward(table.normalized(a), table.voxel_count(a), table.normalized(e.neighbour),
                                         table.voxel_count(e.neighbour)));
    std::sort(w.begin(), w.end());
    const double median = w.size() % 2 ? w[w.size() / 2] : 0.5 * (w[w.size() / 2 - 1] + w[w.size() / 2]);
    CHECK(oracle::close(auto_tau(table, rag), median));

    SimilarityParams p;
    const SimilarityModel model(table, rag, p);
    RegionAggregate region(table);
    region.absorb(table, 0);
    region.absorb(table, 3);
    for (auto c : find_neighbours(rag, region.members())) {
        const double s = model.region(region, c);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        const auto f = table.normalization().apply(region.features());
        const double content = content_similarity(
            ward_distance(f, region.voxels(), table.normalized(c), table.voxel_count(c)), model.tau());
        const double border = border_similarity(rag, region.members(), c);
        CHECK(oracle::close(s, 0.5 * content + 0.5 * border));
    }
    for (std::uint32_t a = 0; a < rag.size(); ++a)
        for (const auto& e : rag.neighbours(a)) {
            const double s = model.pair(a, e.neighbour);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }

    SimilarityParams bad;
    bad.lambda = 1.5;
    CHECK_THROWS_AS(SimilarityModel(table, rag, bad), ParamError);
    bad = {};
    bad.tau = -1.0;
    CHECK_THROWS_AS(SimilarityModel(table, rag, bad), ParamError);
    bad = {};
    bad.sim0 = 2.0;
    CHECK_THROWS_AS(bad.validate(), ParamError);
}

TEST_CASE("model: lambda extremes") {
    const auto sp = ring();
    Volume v(sp.dims(), 1);
    for (std::size_t i = 0; i < v.voxels(); ++i) v.data()[i] = static_cast<float>(i % 5);
    const auto table = extract_features(v, sp, std::vector<int>{0});
    const auto rag = build_rag(sp);

    SimilarityParams only_border;
    only_border.lambda = 0.0;
    RegionAggregate others(table);
    for (std::uint32_t s : {1u, 2u, 3u, 4u}) others.absorb(table, s);
    CHECK(SimilarityModel(table, rag, only_border).region(others, 0) == 1.0);

    SimilarityParams only_content;
    only_content.lambda = 1.0;
    const Volume flat(sp.dims(), 1);
    const auto same = extract_features(flat, sp, std::vector<int>{0});
    RegionAggregate one(same);
    one.absorb(same, 1);
    CHECK(SimilarityModel(same, rag, only_content).region(one, 0) == 1.0);
}

TEST_CASE("auto tau falls back to 1 without edges") {
    Volume v(Dims{2, 2, 2}, 1);
    const LabelMap sp(v.dims());
    const auto table = extract_features(v, sp, std::vector<int>{0});
    CHECK(auto_tau(table, build_rag(sp)) == 1.0);
}
