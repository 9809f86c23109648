#pragma once

#include <cstddef>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

/// Parameters of 3D SLIC clustering.
struct SlicParams {
    int n_segments = 350;          ///< requested supervoxel count K
    double compactness = 0.01;     ///< spatial weight m
    double sigma = 1.0;            ///< pre-smoothing in voxels
    int max_iter = 10;             ///< assignment/update rounds
    double min_size_factor = 0.25; ///< fragments below this fraction of N/K are absorbed
    std::vector<int> channels{0};  ///< volume channels clustered jointly
};

/// Throws ParamError if `p` cannot be applied to `v`.
void validate(const SlicParams& p, const Volume& v);

struct ClusterCenter {
    std::vector<double> intensity;  ///< one entry per clustering channel
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::size_t members = 0;
};

/// Grid step S = (N / K)^(1/3) used by seeding and the distance normalization.
double grid_step(const Dims& d, int n_segments);

/// Smooths the selected channels with p.sigma and rescales them jointly to
/// [0, 1]. The result holds only the clustering channels, in p.channels order.
Volume prepare_for_clustering(const Volume& v, const SlicParams& p);

/// Seeds K centers on a regular grid, moves each to the lowest
/// gradient-magnitude voxel of its 3x3x3 neighbourhood and samples the
/// smoothed, rescaled intensities there.
std::vector<ClusterCenter> init_cluster_centers(const Volume& v, const SlicParams& p);

/// Same as above for a volume already passed through prepare_for_clustering.
std::vector<ClusterCenter> init_cluster_centers_prepared(const Volume& prepared, int n_segments);

/// Runs SLIC and returns a compacted, 6-connected supervoxel map.
LabelMap slic(const Volume& v, const SlicParams& p);

/// Splits every label into its 6-connected components, absorbs components
/// smaller than `min_size` voxels into the neighbouring component sharing the
/// most faces (ties go to the lowest component id) and compacts the labels in
/// scan order.
LabelMap enforce_connectivity(const LabelMap& m, std::size_t min_size);

}  // namespace svx
