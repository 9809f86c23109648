#include "svx/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svx/errors.hpp"
#include "svx/filters.hpp"
#include "svx/parallel.hpp"

namespace svx {

void ChannelStats::add_sample(double x) {
    const double n1 = static_cast<double>(count);
    ++count;
    const double n = static_cast<double>(count);
    const double delta = x - mean;
    const double delta_n = delta / n;
    const double term = delta * delta_n * n1;
    mean += delta_n;
    m3 += term * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
    m2 += term;
}

void ChannelStats::merge(const ChannelStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    const double delta = o.mean - mean;
    const double new_m3 = m3 + o.m3 + delta * delta * delta * na * nb * (na - nb) / (n * n) +
                          3.0 * delta * (na * o.m2 - nb * m2) / n;
    const double new_m2 = m2 + o.m2 + delta * delta * na * nb / n;
    mean += delta * nb / n;
    m2 = new_m2;
    m3 = new_m3;
    count += o.count;
    for (int b = 0; b < kHistogramBins; ++b) {
        intensity_hist[b] += o.intensity_hist[b];
        orientation_hist[b] += o.orientation_hist[b];
        magnitude_hist[b] += o.magnitude_hist[b];
    }
    weighted_contrast += o.weighted_contrast;
    weighted_energy += o.weighted_energy;
    weighted_entropy += o.weighted_entropy;
}

void RegionStats::merge(const RegionStats& other) {
    if (channels.empty()) channels.resize(other.channels.size());
    if (channels.size() != other.channels.size()) throw InternalError("merging statistics of different channel sets");
    voxels += other.voxels;
    for (std::size_t c = 0; c < channels.size(); ++c) channels[c].merge(other.channels[c]);
}

FeatureVector feature_vector(const RegionStats& stats) {
    namespace fi = feature_index;
    FeatureVector f(stats.channels.size() * kFeaturesPerChannel, 0.0);
    for (std::size_t c = 0; c < stats.channels.size(); ++c) {
        const ChannelStats& s = stats.channels[c];
        double* out = &f[c * kFeaturesPerChannel];
        if (s.count == 0) continue;
        const double n = static_cast<double>(s.count);
        const double variance = s.m2 / n;
        out[fi::kMean] = s.mean;
        out[fi::kVariance] = variance;
        out[fi::kSkewness] = variance > 0.0 ? (s.m3 / n) / std::pow(variance, 1.5) : 0.0;
        out[fi::kGlcmContrast] = s.weighted_contrast / n;
        out[fi::kGlcmEnergy] = s.weighted_energy / n;
        out[fi::kGlcmEntropy] = s.weighted_entropy / n;

        double orientation_total = 0.0;
        std::uint64_t magnitude_total = 0;
        for (int b = 0; b < kHistogramBins; ++b) {
            orientation_total += s.orientation_hist[b];
            magnitude_total += s.magnitude_hist[b];
        }
        for (int b = 0; b < kHistogramBins; ++b) {
            out[fi::kIntensityHistogram + b] = static_cast<double>(s.intensity_hist[b]) / n;
            if (orientation_total > 0.0) out[fi::kOrientationHistogram + b] = s.orientation_hist[b] / orientation_total;
            if (magnitude_total > 0) {
                out[fi::kMagnitudeHistogram + b] = static_cast<double>(s.magnitude_hist[b]) / static_cast<double>(magnitude_total);
            }
        }
    }
    return f;
}

namespace {

int scaled_bin(double x, double lo, double hi, int bins) {
    if (!(hi > lo)) return 0;
    const int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

int ChannelRange::intensity_bin(double x) const noexcept { return scaled_bin(x, min, max, kHistogramBins); }

int ChannelRange::glcm_level(double x) const noexcept { return scaled_bin(x, min, max, kGlcmLevels); }

int ChannelRange::magnitude_bin(double magnitude) const noexcept {
    return scaled_bin(magnitude, 0.0, max_gradient, kHistogramBins);
}

int orientation_bin(double gz, double magnitude) noexcept {
    const double angle = std::acos(std::clamp(gz / magnitude, -1.0, 1.0));
    return scaled_bin(angle, 0.0, std::numbers::pi, kHistogramBins);
}

std::array<double, 3> glcm_features(std::span<const std::uint64_t, kGlcmLevels * kGlcmLevels> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return {0.0, 1.0, 0.0};
    double contrast = 0.0, energy = 0.0, entropy = 0.0;
    for (int i = 0; i < kGlcmLevels; ++i) {
        for (int j = 0; j < kGlcmLevels; ++j) {
            const auto c = counts[static_cast<std::size_t>(i * kGlcmLevels + j)];
            if (c == 0) continue;
            const double p = static_cast<double>(c) / static_cast<double>(total);
            contrast += p * (i - j) * (i - j);
            energy += p * p;
            entropy -= p * std::log(p);
        }
    }
    return {contrast, energy, entropy};
}

std::vector<double> Normalization::apply(std::span<const double> f) const {
    std::vector<double> z(f.size(), 0.0);
    for (std::size_t d = 0; d < f.size(); ++d) {
        if (active[d]) z[d] = (f[d] - mean[d]) / stddev[d];
    }
    return z;
}

FeatureTable::FeatureTable(std::vector<int> channels, std::vector<ChannelRange> ranges, std::vector<RegionStats> stats)
    : channels_(std::move(channels)), ranges_(std::move(ranges)), stats_(std::move(stats)) {
    features_.reserve(stats_.size());
    for (const auto& s : stats_) features_.push_back(feature_vector(s));

    const std::size_t dims = channels_.size() * kFeaturesPerChannel;
    norm_.mean.assign(dims, 0.0);
    norm_.stddev.assign(dims, 0.0);
    norm_.active.assign(dims, false);
    if (!features_.empty()) {
        const double k = static_cast<double>(features_.size());
        for (const auto& f : features_) {
            for (std::size_t d = 0; d < dims; ++d) norm_.mean[d] += f[d];
        }
        for (auto& m : norm_.mean) m /= k;
        for (const auto& f : features_) {
            for (std::size_t d = 0; d < dims; ++d) norm_.stddev[d] += (f[d] - norm_.mean[d]) * (f[d] - norm_.mean[d]);
        }
        for (std::size_t d = 0; d < dims; ++d) {
            norm_.stddev[d] = std::sqrt(norm_.stddev[d] / k);
            norm_.active[d] = norm_.stddev[d] > 1e-12 * std::max(1.0, std::abs(norm_.mean[d]));
        }
    }
    normalized_.reserve(features_.size());
    for (const auto& f : features_) normalized_.push_back(norm_.apply(f));
}

FeatureTable extract_features(const Volume& v, const LabelMap& sp, std::span<const int> channels) {
    if (sp.dims() != v.dims()) throw ParamError("supervoxel map dims do not match the volume");
    if (channels.empty()) throw ParamError("feature extraction needs at least one channel");
    for (int c : channels) {
        if (c < 0 || c >= v.channels()) throw ParamError("feature channel " + std::to_string(c) + " out of range");
    }
    const Dims& d = v.dims();
    const std::size_t n = d.voxels();
    const auto labels = sp.labels();
    const std::uint32_t k = sp.label_count();

    std::vector<std::uint64_t> sizes(k, 0);
    for (auto l : labels) ++sizes[l];
    for (std::uint32_t s = 0; s < k; ++s) {
        if (sizes[s] == 0) throw InternalError("supervoxel " + std::to_string(s) + " is empty");
    }

    std::vector<RegionStats> stats(k);
    for (std::uint32_t s = 0; s < k; ++s) {
        stats[s].voxels = sizes[s];
        stats[s].channels.resize(channels.size());
    }
    std::vector<ChannelRange> ranges(channels.size());

    parallel_for(channels.size(), [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            const auto f = v.channel(channels[c]);
            const auto grad = gradient_field(v, channels[c]);
            std::vector<double> magnitude(n);
            ChannelRange& range = ranges[c];
            const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
            range.min = *lo;
            range.max = *hi;
            range.degenerate = !(range.max > range.min);
            for (std::size_t i = 0; i < n; ++i) {
                const double gx = grad.gx[i], gy = grad.gy[i], gz = grad.gz[i];
                magnitude[i] = std::sqrt(gx * gx + gy * gy + gz * gz);
                range.max_gradient = std::max(range.max_gradient, magnitude[i]);
            }

            std::vector<std::uint64_t> glcm(static_cast<std::size_t>(k) * kGlcmLevels * kGlcmLevels, 0);
            for (int z = 0; z < d.nz; ++z) {
                for (int y = 0; y < d.ny; ++y) {
                    for (int x = 0; x < d.nx; ++x) {
                        const std::size_t i = d.index(x, y, z);
                        const std::uint32_t s = labels[i];
                        ChannelStats& cs = stats[s].channels[c];
                        cs.add_sample(f[i]);
                        ++cs.intensity_hist[range.intensity_bin(f[i])];
                        if (magnitude[i] > 0.0) {
                            cs.orientation_hist[orientation_bin(grad.gz[i], magnitude[i])] += magnitude[i];
                            ++cs.magnitude_hist[range.magnitude_bin(magnitude[i])];
                        }
                        const int li = range.glcm_level(f[i]);
                        std::uint64_t* m = &glcm[static_cast<std::size_t>(s) * kGlcmLevels * kGlcmLevels];
                        const int forward[3][3] = {{x + 1, y, z}, {x, y + 1, z}, {x, y, z + 1}};
                        for (const auto& nb : forward) {
                            if (!d.contains(nb[0], nb[1], nb[2])) continue;
                            const std::size_t j = d.index(nb[0], nb[1], nb[2]);
                            if (labels[j] != s) continue;
                            const int lj = range.glcm_level(f[j]);
                            ++m[li * kGlcmLevels + lj];
                            ++m[lj * kGlcmLevels + li];
                        }
                    }
                }
            }
            for (std::uint32_t s = 0; s < k; ++s) {
                const auto texture = glcm_features(std::span<const std::uint64_t, kGlcmLevels * kGlcmLevels>(
                    &glcm[static_cast<std::size_t>(s) * kGlcmLevels * kGlcmLevels], kGlcmLevels * kGlcmLevels));
                ChannelStats& cs = stats[s].channels[c];
                const double count = static_cast<double>(cs.count);
                cs.weighted_contrast = count * texture[0];
                cs.weighted_energy = count * texture[1];
                cs.weighted_entropy = count * texture[2];
            }
        }
    });

    return FeatureTable(std::vector<int>(channels.begin(), channels.end()), std::move(ranges), std::move(stats));
}

RegionAggregate::RegionAggregate(const FeatureTable& table) : flags_(table.size(), false) {
    stats_.channels.resize(table.channels().size());
}

void RegionAggregate::absorb(const FeatureTable& table, std::uint32_t sv) {
    if (sv >= table.size()) throw ParamError("supervoxel id " + std::to_string(sv) + " out of range");
    if (flags_.size() != table.size()) flags_.resize(table.size(), false);
    if (flags_[sv]) throw StateError("supervoxel " + std::to_string(sv) + " is already part of the region");
    flags_[sv] = true;
    members_.push_back(sv);
    stats_.merge(table.stats(sv));
}

RegionAggregate merge_features(const FeatureTable& table, RegionAggregate region, std::uint32_t sv) {
    region.absorb(table, sv);
    return region;
}

}  // namespace svx
