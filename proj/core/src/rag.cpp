#include "svx/rag.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "svx/errors.hpp"

namespace svx {

Rag::Rag(std::vector<std::vector<RagEdge>> adjacency, std::vector<std::uint64_t> boundary_faces)
    : adjacency_(std::move(adjacency)), boundary_faces_(std::move(boundary_faces)) {}

std::uint64_t Rag::shared_faces(std::uint32_t a, std::uint32_t b) const {
    const auto& edges = adjacency_.at(a);
    auto it = std::lower_bound(edges.begin(), edges.end(), b,
                               [](const RagEdge& e, std::uint32_t id) { return e.neighbour < id; });
    return it != edges.end() && it->neighbour == b ? it->faces : 0;
}

std::size_t Rag::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : adjacency_) n += e.size();
    return n / 2;
}

Rag build_rag(const LabelMap& sp) {
    const Dims& d = sp.dims();
    const auto labels = sp.labels();
    const std::uint32_t k = sp.label_count();
    std::vector<std::uint64_t> boundary(k, 0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> pairs;

    for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
            for (int x = 0; x < d.nx; ++x) {
                const std::uint32_t a = labels[d.index(x, y, z)];
                const int c[3] = {x, y, z};
                for (int axis = 0; axis < 3; ++axis) {
                    // Volume-border faces on both ends of the axis.
                    if (c[axis] == 0) ++boundary[a];
                    if (c[axis] == d[axis] - 1) {
                        ++boundary[a];
                        continue;
                    }
                    int n[3] = {x, y, z};
                    ++n[axis];
                    const std::uint32_t b = labels[d.index(n[0], n[1], n[2])];
                    if (a == b) continue;
                    ++boundary[a];
                    ++boundary[b];
                    ++pairs[{std::min(a, b), std::max(a, b)}];
                }
            }
        }
    }

    std::vector<std::vector<RagEdge>> adjacency(k);
    for (const auto& [key, faces] : pairs) {
        adjacency[key.first].push_back({key.second, faces});
        adjacency[key.second].push_back({key.first, faces});
    }
    for (auto& edges : adjacency) {
        std::sort(edges.begin(), edges.end(), [](const RagEdge& a, const RagEdge& b) { return a.neighbour < b.neighbour; });
    }
    return Rag(std::move(adjacency), std::move(boundary));
}

namespace {

std::vector<bool> membership(const Rag& rag, std::span<const std::uint32_t> members) {
    std::vector<bool> flags(rag.size(), false);
    for (auto m : members) {
        if (m >= rag.size()) throw ParamError("supervoxel id " + std::to_string(m) + " out of range");
        flags[m] = true;
    }
    return flags;
}

}  // namespace

std::vector<std::uint32_t> find_neighbours(const Rag& rag, std::span<const std::uint32_t> members) {
    if (members.empty()) throw ParamError("find_neighbours needs a non-empty member set");
    const auto flags = membership(rag, members);
    std::vector<bool> seen(rag.size(), false);
    std::vector<std::uint32_t> out;
    for (auto m : members) {
        for (const auto& e : rag.neighbours(m)) {
            if (flags[e.neighbour] || seen[e.neighbour]) continue;
            seen[e.neighbour] = true;
            out.push_back(e.neighbour);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t shared_border(const Rag& rag, std::span<const std::uint32_t> members, std::uint32_t candidate) {
    if (candidate >= rag.size()) throw ParamError("candidate id out of range");
    if (std::find(members.begin(), members.end(), candidate) != members.end()) {
        throw ParamError("candidate " + std::to_string(candidate) + " is a member of the region");
    }
    const auto flags = membership(rag, members);
    std::uint64_t faces = 0;
    for (const auto& e : rag.neighbours(candidate)) {
        if (flags[e.neighbour]) faces += e.faces;
    }
    return faces;
}

std::uint64_t region_boundary_faces(const Rag& rag, std::span<const std::uint32_t> members) {
    const auto flags = membership(rag, members);
    std::uint64_t total = 0;
    std::uint64_t internal = 0;
    for (auto m : members) {
        total += rag.boundary_faces(m);
        for (const auto& e : rag.neighbours(m)) {
            if (flags[e.neighbour]) internal += e.faces;
        }
    }
    // `internal` counted every member-member edge from both sides.
    return total - internal;
}

}  // namespace svx
