#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svx/features.hpp"
#include "svx/rag.hpp"
#include "svx/similarity.hpp"
#include "svx/supervoxel.hpp"
#include "svx/volume.hpp"

namespace svx {

struct RefineParams {
    SimilarityParams similarity;             ///< holds sim0, lambda and tau
    int n_c = 30;                            ///< candidates examined per pass
    double fit_threshold = 0.5;              ///< seed overlap fraction a supervoxel must exceed
    std::optional<std::size_t> max_passes;   ///< default: supervoxel count
    SlicParams slic;
    std::vector<int> feature_channels;       ///< empty: use slic.channels

    void validate() const;
};

struct MergeRecord {
    std::uint32_t supervoxel = 0;
    double similarity = 0.0;
    std::uint64_t voxels = 0;  ///< voxels of the merged supervoxel
};

/// The refined pseudo-label p_r as a set of supervoxels.
struct RegionState {
    RegionAggregate region;
    std::vector<std::uint32_t> neighbours;  ///< N_p, sorted
    std::vector<MergeRecord> log;
};

/// Seeds the region with every supervoxel whose fraction of voxels inside
/// `seed` strictly exceeds `threshold`. EmptySeedError for an empty seed,
/// NoSeedOverlapError when no supervoxel qualifies.
RegionState fit_pseudolabel(const LabelMap& sp, const LabelMap& seed, double threshold, const FeatureTable& table,
                            const Rag& rag);

struct GrowthTrace {
    std::size_t passes = 0;
    std::size_t max_evaluations_in_pass = 0;
};

/// Greedy mutual-choice merging: each pass ranks the region's neighbours by
/// similarity, examines up to n_c of them best-first, and merges the first
/// candidate whose own most similar neighbour is a region member and whose
/// similarity to the region exceeds sim0. Stops after a pass without a merge.
GrowthTrace grow_region(RegionState& state, const SimilarityModel& model, const Rag& rag, const RefineParams& params);

/// Binary mask covering every voxel of the listed supervoxels.
LabelMap members_to_mask(const LabelMap& sp, const std::vector<std::uint32_t>& members);

enum class RefineStatus { Refined, SeedPassthrough };

struct RefineResult {
    LabelMap mask;
    RefineStatus status = RefineStatus::Refined;
    std::string warning;
    std::vector<std::uint32_t> seed_members;
    std::vector<std::uint32_t> members;
    std::vector<MergeRecord> log;
    std::size_t supervoxels = 0;
    double tau = 0.0;
    GrowthTrace trace;
};

/// Refinement on a precomputed supervoxel map.
RefineResult refine_on_supervoxels(const Volume& v, const LabelMap& sp, const LabelMap& seed, const RefineParams& params);

/// Builds supervoxels with params.slic, then refines `seed` on them.
RefineResult refine_region(const Volume& v, const LabelMap& seed, const RefineParams& params);

/// Channel index of each modality inside a case volume.
struct ModalityRoles {
    int t1 = -1;
    int t1gd = -1;
    int t2 = -1;
    int flair = -1;

    /// Parses "T1=0,T1Gd=1,T2=2,FLAIR=3". ConfigError on malformed input.
    static ModalityRoles parse(const std::string& text);
    /// ConfigError unless all four roles name distinct channels of the volume.
    void validate(int channels) const;
};

struct CaseResult {
    RefineResult wt;
    RefineResult tc;  ///< tc.mask is already clipped to wt.mask
};

/// Refines whole tumour on FLAIR supervoxels and tumour core on joint
/// (T1Gd, T2) supervoxels, then intersects the core with the whole tumour.
/// `params.slic.channels` and `params.feature_channels` are overridden per
/// region; features default to (T1Gd, T2, FLAIR).
CaseResult refine_case(const Volume& v, const ModalityRoles& roles, const LabelMap& seed_wt, const LabelMap& seed_tc,
                       const RefineParams& params);

}  // namespace svx
