#pragma once

#include <cmath>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

/// Per-channel separable Gaussian smoothing. Kernel radius is ceil(3*sigma)
/// voxels, borders are handled by edge replication and sigma == 0 returns an
/// exact copy. Throws ParamError for negative or non-finite sigma.
Volume gaussian_smooth(const Volume& v, double sigma);

/// Normalized 1D Gaussian taps for offsets -radius..radius.
std::vector<double> gaussian_kernel(double sigma);

/// Finite-difference gradient of one channel in voxel units: central
/// differences inside, one-sided differences on the faces, zero along axes of
/// extent 1.
struct GradientField {
    Dims dims;
    std::vector<float> gx;
    std::vector<float> gy;
    std::vector<float> gz;

    float magnitude(std::size_t i) const noexcept {
        return std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + gz[i] * gz[i]);
    }
};

GradientField gradient_field(const Volume& v, int channel);

}  // namespace svx
