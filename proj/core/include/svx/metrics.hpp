#pragma once

#include <cstdint>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

/// 2|A and B| / (|A| + |B|); 1.0 when both masks are empty.
double dsc(const LabelMap& a, const LabelMap& b);

/// |A and B| / |A or B|; 1.0 when both masks are empty.
double iou(const LabelMap& a, const LabelMap& b);

/// Foreground voxels with at least one background or out-of-volume face neighbour.
std::vector<std::size_t> surface_voxels(const LabelMap& mask);

/// Squared Euclidean distance (in mm^2, using `spacing`) from every voxel to
/// the nearest voxel where `features` is true. Infinite when there is none.
std::vector<double> squared_distance_transform(const Dims& dims, const Spacing& spacing, const std::vector<bool>& features);

/// Percentile in [0, 100] with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

/// 95th-percentile symmetric surface distance in millimetres, taken as the
/// larger of the two directed 95th percentiles. Uses the spacing argument,
/// not the masks' own. EmptyMaskError if either mask is empty.
double hd95(const LabelMap& a, const LabelMap& b, const Spacing& spacing);

struct MetricsReport {
    double dsc = 0.0;
    double iou = 0.0;
    double hd95_mm = 0.0;
    std::size_t pred_voxels = 0;
    std::size_t gt_voxels = 0;
};

/// All three metrics; hd95 uses the ground truth's spacing.
MetricsReport evaluate(const LabelMap& pred, const LabelMap& gt);

}  // namespace svx
