#include "svx/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "svx/errors.hpp"

namespace svx {

void SimilarityParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParamError("lambda must be in [0, 1]");
    if (tau && !(std::isfinite(*tau) && *tau > 0.0)) throw ParamError("tau must be > 0");
    if (!(sim0 >= 0.0 && sim0 <= 1.0)) throw ParamError("sim0 must be in [0, 1]");
}

double ward_distance(std::span<const double> a, std::uint64_t count_a, std::span<const double> b, std::uint64_t count_b) {
    if (count_a == 0 || count_b == 0) throw ParamError("ward_distance needs non-empty clusters");
    if (a.size() != b.size()) throw ParamError("feature vectors differ in length");
    double dist2 = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) dist2 += (a[d] - b[d]) * (a[d] - b[d]);
    const double na = static_cast<double>(count_a), nb = static_cast<double>(count_b);
    return na * nb / (na + nb) * dist2;
}

double content_similarity(double ward, double tau) {
    if (!(tau > 0.0)) throw ParamError("tau must be > 0");
    return std::exp(-ward / tau);
}

double border_similarity(const Rag& rag, std::span<const std::uint32_t> members, std::uint32_t candidate) {
    const std::uint64_t shared = shared_border(rag, members, candidate);
    if (shared == 0) return 0.0;
    const std::uint64_t denom = std::min(rag.boundary_faces(candidate), region_boundary_faces(rag, members));
    return denom == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(denom);
}

double auto_tau(const FeatureTable& table, const Rag& rag) {
    std::vector<double> distances;
    for (std::uint32_t a = 0; a < rag.size(); ++a) {
        for (const auto& e : rag.neighbours(a)) {
            if (e.neighbour <= a) continue;
            distances.push_back(ward_distance(table.normalized(a), table.voxel_count(a), table.normalized(e.neighbour),
                                              table.voxel_count(e.neighbour)));
        }
    }
    if (distances.empty()) return 1.0;
    std::sort(distances.begin(), distances.end());
    const std::size_t m = distances.size() / 2;
    const double median = distances.size() % 2 ? distances[m] : 0.5 * (distances[m - 1] + distances[m]);
    return median > 0.0 ? median : 1.0;
}

SimilarityModel::SimilarityModel(const FeatureTable& table, const Rag& rag, SimilarityParams params)
    : table_(&table), rag_(&rag), params_(params) {
    params_.validate();
    if (table.size() != rag.size()) throw ParamError("feature table and RAG describe different supervoxel maps");
    tau_ = params_.tau ? *params_.tau : auto_tau(table, rag);
}

std::vector<double> SimilarityModel::normalized(const RegionAggregate& region) const {
    return table_->normalization().apply(region.features());
}

double SimilarityModel::region(const RegionAggregate& region, std::uint32_t candidate) const {
    const auto features = normalized(region);
    return this->region(region, features, candidate);
}

double SimilarityModel::region(const RegionAggregate& region, std::span<const double> region_features,
                               std::uint32_t candidate) const {
    if (region.empty()) throw ParamError("similarity needs a non-empty region");
    const double ward = ward_distance(region_features, region.voxels(), table_->normalized(candidate),
                                      table_->voxel_count(candidate));
    const double content = content_similarity(ward, tau_);
    const double border = border_similarity(*rag_, region.members(), candidate);
    return params_.lambda * content + (1.0 - params_.lambda) * border;
}

double SimilarityModel::pair(std::uint32_t a, std::uint32_t b) const {
    const double ward =
        ward_distance(table_->normalized(a), table_->voxel_count(a), table_->normalized(b), table_->voxel_count(b));
    const double content = content_similarity(ward, tau_);
    const std::uint32_t member[1] = {a};
    const double border = border_similarity(*rag_, member, b);
    return params_.lambda * content + (1.0 - params_.lambda) * border;
}

}  // namespace svx
