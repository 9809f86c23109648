#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "svx/features.hpp"
#include "svx/rag.hpp"

namespace svx {

struct SimilarityParams {
    double lambda = 0.5;        ///< weight of the content term
    std::optional<double> tau;  ///< content distance scale; empty means auto
    double sim0 = 0.1;          ///< stopping similarity

    void validate() const;
};

/// Ward merge cost (n_a n_b / (n_a + n_b)) * |f_a - f_b|^2 between two
/// clusters with z-scored feature means. ParamError on a zero count.
double ward_distance(std::span<const double> a, std::uint64_t count_a, std::span<const double> b, std::uint64_t count_b);

/// exp(-ward / tau).
double content_similarity(double ward, double tau);

/// Faces shared between candidate and region, over the smaller of the
/// candidate's and the region's boundary face totals. 0 when not adjacent.
double border_similarity(const Rag& rag, std::span<const std::uint32_t> members, std::uint32_t candidate);

/// Median Ward distance over all RAG edges; 1.0 when the median is 0 or the
/// graph has no edges.
double auto_tau(const FeatureTable& table, const Rag& rag);

/// Sim(., .) bound to one supervoxel map: lambda * content + (1 - lambda) * border.
class SimilarityModel {
public:
    SimilarityModel(const FeatureTable& table, const Rag& rag, SimilarityParams params);

    double tau() const noexcept { return tau_; }
    const SimilarityParams& params() const noexcept { return params_; }
    const FeatureTable& table() const noexcept { return *table_; }
    const Rag& rag() const noexcept { return *rag_; }

    /// Similarity between a growing region and one candidate supervoxel.
    double region(const RegionAggregate& region, std::uint32_t candidate) const;
    /// Same, with the region's z-scored features precomputed.
    double region(const RegionAggregate& region, std::span<const double> region_features, std::uint32_t candidate) const;
    /// Similarity between two individual supervoxels.
    double pair(std::uint32_t a, std::uint32_t b) const;

    /// Z-scored feature vector of a region aggregate.
    std::vector<double> normalized(const RegionAggregate& region) const;

private:
    const FeatureTable* table_;
    const Rag* rag_;
    SimilarityParams params_;
    double tau_;
};

}  // namespace svx
