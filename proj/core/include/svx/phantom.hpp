#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "svx/volume.hpp"

namespace svx {

/// Channel layout of generated phantoms.
namespace phantom_channel {
inline constexpr int kT1 = 0;
inline constexpr int kT1Gd = 1;
inline constexpr int kT2 = 2;
inline constexpr int kFlair = 3;
inline constexpr int kCount = 4;
}  // namespace phantom_channel

/// Intensity offsets from the background for one channel. Whole-tumour voxels
/// outside the core take `edema`, core voxels take `core`.
struct ChannelContrast {
    double edema = 0.0;
    double core = 0.0;
};

struct PhantomParams {
    Dims dims{64, 64, 64};
    std::uint64_t seed = 0;
    int wt_blobs = 3;
    double background = 0.2;
    std::array<ChannelContrast, phantom_channel::kCount> contrast{{
        {-0.05, -0.10},  // T1
        {0.0, 0.5},      // T1Gd
        {0.15, 0.5},     // T2
        {0.6, 0.6},      // FLAIR
    }};
    double noise_sigma = 0.02;
    double bias_amplitude = 0.1;

    void validate() const;
};

struct Phantom {
    Volume volume;
    LabelMap wt;
    LabelMap tc;
};

/// Deterministic in (params, seed): whole tumour is a union of random
/// ellipsoids, the core a 0.6-scale copy of the first ellipsoid.
Phantom generate_phantom(const PhantomParams& p);

enum class CorruptionMode { Erode, Dilate, DropComponents, BoundaryNoise };

CorruptionMode parse_corruption_mode(const std::string& name);
const char* to_string(CorruptionMode mode);

/// Simulates an inaccurate pseudo-label.
///   Erode / Dilate:  spherical structuring element of radius `magnitude`
///                    (voxels outside the volume count as background)
///   DropComponents:  removes the smallest 6-connected components while the
///                    removed total stays within `magnitude` of the foreground
///   BoundaryNoise:   flips each voxel that has a differing face neighbour
///                    with probability `magnitude`
/// EmptySeedError if the input or the result has no foreground.
LabelMap corrupt_seed(const LabelMap& mask, CorruptionMode mode, double magnitude, std::uint64_t seed);

}  // namespace svx
