#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

inline constexpr int kHistogramBins = 10;
inline constexpr int kGlcmLevels = 16;
inline constexpr int kFeaturesPerChannel = 36;

/// Offsets of each feature inside one channel's block of 36 values.
namespace feature_index {
inline constexpr int kMean = 0;
inline constexpr int kVariance = 1;
inline constexpr int kSkewness = 2;
inline constexpr int kIntensityHistogram = 3;     // 10 bins
inline constexpr int kGlcmContrast = 13;
inline constexpr int kGlcmEnergy = 14;
inline constexpr int kGlcmEntropy = 15;
inline constexpr int kOrientationHistogram = 16;  // 10 bins
inline constexpr int kMagnitudeHistogram = 26;    // 10 bins
}  // namespace feature_index

/// Mergeable sufficient statistics of one channel over a voxel set.
///
/// Moments are kept as (count, mean, M2, M3) with M_k the k-th central moment
/// sum, which merges exactly and without the cancellation of raw power sums.
/// GLCM features are kept as voxel-count weighted sums, so a merged region
/// reports the count-weighted average of its parts' texture features.
struct ChannelStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    std::array<std::uint64_t, kHistogramBins> intensity_hist{};
    double weighted_contrast = 0.0;
    double weighted_energy = 0.0;
    double weighted_entropy = 0.0;
    std::array<double, kHistogramBins> orientation_hist{};
    std::array<std::uint64_t, kHistogramBins> magnitude_hist{};

    /// Welford-style single-sample update of the moments.
    void add_sample(double x);
    /// Combines `other` into this (pairwise moment update).
    void merge(const ChannelStats& other);
};

struct RegionStats {
    std::uint64_t voxels = 0;
    std::vector<ChannelStats> channels;

    void merge(const RegionStats& other);
};

using FeatureVector = std::vector<double>;

/// 36 values per channel in the order of feature_index.
FeatureVector feature_vector(const RegionStats& stats);

/// Per-channel binning context shared by all supervoxels of a volume.
struct ChannelRange {
    double min = 0.0;
    double max = 0.0;
    double max_gradient = 0.0;
    bool degenerate = false;  ///< max == min: every sample falls in bin 0

    int intensity_bin(double x) const noexcept;
    int glcm_level(double x) const noexcept;
    int magnitude_bin(double magnitude) const noexcept;
};

/// Polar-angle bin of a non-zero gradient, angle = acos(gz / |g|) in [0, pi].
int orientation_bin(double gz, double magnitude) noexcept;

/// GLCM contrast, energy and entropy of a symmetric co-occurrence count
/// matrix. An empty matrix is treated as a constant region (0, 1, 0).
std::array<double, 3> glcm_features(std::span<const std::uint64_t, kGlcmLevels * kGlcmLevels> counts);

/// Per-dimension z-scoring context over all supervoxel feature vectors.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<bool> active;  ///< false for dimensions with no spread

    /// Z-scores `f`; inactive dimensions are set to 0.
    std::vector<double> apply(std::span<const double> f) const;
};

class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<int> channels, std::vector<ChannelRange> ranges, std::vector<RegionStats> stats);

    std::size_t size() const noexcept { return stats_.size(); }
    const std::vector<int>& channels() const noexcept { return channels_; }
    const std::vector<ChannelRange>& ranges() const noexcept { return ranges_; }
    const RegionStats& stats(std::uint32_t sv) const { return stats_.at(sv); }
    const FeatureVector& features(std::uint32_t sv) const { return features_.at(sv); }
    const std::vector<double>& normalized(std::uint32_t sv) const { return normalized_.at(sv); }
    std::uint64_t voxel_count(std::uint32_t sv) const { return stats_.at(sv).voxels; }
    const Normalization& normalization() const noexcept { return norm_; }

private:
    std::vector<int> channels_;
    std::vector<ChannelRange> ranges_;
    std::vector<RegionStats> stats_;
    std::vector<FeatureVector> features_;
    std::vector<std::vector<double>> normalized_;
    Normalization norm_;
};

/// Computes statistics for every supervoxel of `sp` over the listed channels.
/// Supervoxel ids must be 0..K-1 with every id present.
FeatureTable extract_features(const Volume& v, const LabelMap& sp, std::span<const int> channels);

/// A growing union of supervoxels with its merged statistics.
class RegionAggregate {
public:
    RegionAggregate() = default;
    explicit RegionAggregate(const FeatureTable& table);

    bool contains(std::uint32_t sv) const noexcept { return sv < flags_.size() && flags_[sv]; }
    const std::vector<std::uint32_t>& members() const noexcept { return members_; }
    const RegionStats& stats() const noexcept { return stats_; }
    std::uint64_t voxels() const noexcept { return stats_.voxels; }
    bool empty() const noexcept { return members_.empty(); }

    FeatureVector features() const { return feature_vector(stats_); }

    /// Adds supervoxel `sv`. StateError if it is already a member.
    void absorb(const FeatureTable& table, std::uint32_t sv);

private:
    std::vector<bool> flags_;
    std::vector<std::uint32_t> members_;
    RegionStats stats_;
};

/// Returns `region` with `sv` merged in.
RegionAggregate merge_features(const FeatureTable& table, RegionAggregate region, std::uint32_t sv);

}  // namespace svx
