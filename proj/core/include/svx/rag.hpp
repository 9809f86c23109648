#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svx/volume.hpp"

namespace svx {

struct RagEdge {
    std::uint32_t neighbour;
    std::uint64_t faces;  ///< 6-neighbour voxel pairs straddling the two labels
};

/// Region adjacency graph of a supervoxel map under face (6-) adjacency.
class Rag {
public:
    Rag() = default;
    Rag(std::vector<std::vector<RagEdge>> adjacency, std::vector<std::uint64_t> boundary_faces);

    std::size_t size() const noexcept { return adjacency_.size(); }
    /// Neighbours of `sv`, sorted by id.
    std::span<const RagEdge> neighbours(std::uint32_t sv) const { return adjacency_.at(sv); }
    /// Faces of `sv` touching a different label or the volume border.
    std::uint64_t boundary_faces(std::uint32_t sv) const { return boundary_faces_.at(sv); }
    /// Shared faces between two supervoxels, 0 if not adjacent.
    std::uint64_t shared_faces(std::uint32_t a, std::uint32_t b) const;
    std::size_t edge_count() const noexcept;

private:
    std::vector<std::vector<RagEdge>> adjacency_;
    std::vector<std::uint64_t> boundary_faces_;
};

Rag build_rag(const LabelMap& sp);

/// Supervoxels adjacent to at least one member and not members themselves,
/// sorted by id. ParamError for an empty member set.
std::vector<std::uint32_t> find_neighbours(const Rag& rag, std::span<const std::uint32_t> members);

/// Total faces shared between `candidate` and any member. ParamError if the
/// candidate is itself a member.
std::uint64_t shared_border(const Rag& rag, std::span<const std::uint32_t> members, std::uint32_t candidate);

/// Boundary faces of the union of `members`: faces to non-members or to the
/// volume border.
std::uint64_t region_boundary_faces(const Rag& rag, std::span<const std::uint32_t> members);

}  // namespace svx
