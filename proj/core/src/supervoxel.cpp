#include "svx/supervoxel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "svx/errors.hpp"
#include "svx/filters.hpp"
#include "svx/parallel.hpp"

namespace svx {
namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

constexpr int kFaceOffsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

std::vector<int> grid_counts(const Dims& d, int k, double step) {
    std::vector<int> counts(3);
    for (int a = 0; a < 3; ++a) {
        counts[a] = std::clamp(static_cast<int>(std::lround(d[a] / step)), 1, d[a]);
    }
    auto total = [&] {
        return static_cast<long long>(counts[0]) * counts[1] * counts[2];
    };
    while (total() < k) {
        int best = -1;
        double best_ratio = -1.0;
        for (int a = 0; a < 3; ++a) {
            if (counts[a] >= d[a]) continue;
            const double ratio = static_cast<double>(d[a]) / counts[a];
            if (ratio > best_ratio) {
                best_ratio = ratio;
                best = a;
            }
        }
        if (best < 0) break;
        ++counts[best];
    }
    return counts;
}

int grid_position(int i, int extent, int count) {
    const double pos = (i + 0.5) * static_cast<double>(extent) / count - 0.5;
    return std::clamp(static_cast<int>(std::floor(pos)), 0, extent - 1);
}

// Squared gradient magnitude summed over all channels of the prepared volume.
std::vector<double> gradient_energy(const Volume& prepared) {
    std::vector<double> energy(prepared.voxels(), 0.0);
    for (int c = 0; c < prepared.channels(); ++c) {
        const auto g = gradient_field(prepared, c);
        for (std::size_t i = 0; i < energy.size(); ++i) {
            energy[i] += static_cast<double>(g.gx[i]) * g.gx[i] + static_cast<double>(g.gy[i]) * g.gy[i] +
                         static_cast<double>(g.gz[i]) * g.gz[i];
        }
    }
    return energy;
}

}  // namespace

void validate(const SlicParams& p, const Volume& v) {
    if (p.n_segments < 1) throw ParamError("n_segments must be >= 1");
    if (static_cast<std::size_t>(p.n_segments) > v.voxels()) {
        throw ParamError("n_segments (" + std::to_string(p.n_segments) + ") exceeds the voxel count");
    }
    if (!std::isfinite(p.compactness) || p.compactness <= 0.0) throw ParamError("compactness must be > 0");
    if (!std::isfinite(p.sigma) || p.sigma < 0.0) throw ParamError("sigma must be >= 0");
    if (p.max_iter < 1) throw ParamError("max_iter must be >= 1");
    if (!(p.min_size_factor >= 0.0 && p.min_size_factor <= 1.0)) throw ParamError("min_size_factor must be in [0, 1]");
    if (p.channels.empty()) throw ParamError("at least one clustering channel is required");
    for (int c : p.channels) {
        if (c < 0 || c >= v.channels()) throw ParamError("clustering channel " + std::to_string(c) + " out of range");
    }
}

double grid_step(const Dims& d, int n_segments) {
    return std::cbrt(static_cast<double>(d.voxels()) / n_segments);
}

Volume prepare_for_clustering(const Volume& v, const SlicParams& p) {
    validate(p, v);
    Volume selected = gaussian_smooth(v.select_channels(p.channels), p.sigma);
    auto data = selected.data();
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    const double min = *lo;
    const double range = static_cast<double>(*hi) - min;
    for (auto& s : data) s = range > 0.0 ? static_cast<float>((s - min) / range) : 0.0f;
    return selected;
}

std::vector<ClusterCenter> init_cluster_centers_prepared(const Volume& prepared, int n_segments) {
    const Dims& d = prepared.dims();
    if (n_segments < 1 || static_cast<std::size_t>(n_segments) > d.voxels()) {
        throw ParamError("n_segments must be in [1, voxel count]");
    }
    const double step = grid_step(d, n_segments);
    const auto counts = grid_counts(d, n_segments, step);

    struct Node {
        int x, y, z;
        double dist2;
        std::size_t index;
    };
    std::vector<Node> nodes;
    const double mx = (d.nx - 1) / 2.0, my = (d.ny - 1) / 2.0, mz = (d.nz - 1) / 2.0;
    for (int k = 0; k < counts[2]; ++k) {
        for (int j = 0; j < counts[1]; ++j) {
            for (int i = 0; i < counts[0]; ++i) {
                const int x = grid_position(i, d.nx, counts[0]);
                const int y = grid_position(j, d.ny, counts[1]);
                const int z = grid_position(k, d.nz, counts[2]);
                const double dist2 = (x - mx) * (x - mx) + (y - my) * (y - my) + (z - mz) * (z - mz);
                nodes.push_back({x, y, z, dist2, d.index(x, y, z)});
            }
        }
    }
    if (nodes.size() > static_cast<std::size_t>(n_segments)) {
        std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
            if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
            return a.index < b.index;
        });
        nodes.resize(static_cast<std::size_t>(n_segments));
        std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.index < b.index; });
    }

    const auto energy = gradient_energy(prepared);
    std::vector<ClusterCenter> centers;
    centers.reserve(nodes.size());
    for (const auto& node : nodes) {
        int bx = node.x, by = node.y, bz = node.z;
        double best = energy[node.index];
        for (int dz = -1; dz <= 1; ++dz) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = node.x + dx, y = node.y + dy, z = node.z + dz;
                    if (!d.contains(x, y, z)) continue;
                    const double e = energy[d.index(x, y, z)];
                    if (e < best) {
                        best = e;
                        bx = x;
                        by = y;
                        bz = z;
                    }
                }
            }
        }
        ClusterCenter c;
        c.x = bx;
        c.y = by;
        c.z = bz;
        c.intensity.resize(static_cast<std::size_t>(prepared.channels()));
        for (int ch = 0; ch < prepared.channels(); ++ch) c.intensity[ch] = prepared.at(ch, bx, by, bz);
        centers.push_back(std::move(c));
    }
    return centers;
}

std::vector<ClusterCenter> init_cluster_centers(const Volume& v, const SlicParams& p) {
    return init_cluster_centers_prepared(prepare_for_clustering(v, p), p.n_segments);
}

LabelMap slic(const Volume& v, const SlicParams& p) {
    const Volume prepared = prepare_for_clustering(v, p);
    const Dims& d = prepared.dims();
    const int channels = prepared.channels();
    const double step = grid_step(d, p.n_segments);
    const double spatial_weight = (p.compactness / step) * (p.compactness / step);
    auto centers = init_cluster_centers_prepared(prepared, p.n_segments);
    const std::size_t k_count = centers.size();

    std::vector<std::span<const float>> planes;
    for (int c = 0; c < channels; ++c) planes.push_back(prepared.channel(c));

    auto distance2 = [&](const ClusterCenter& c, std::size_t i, int x, int y, int z) {
        double dc = 0.0;
        for (int ch = 0; ch < channels; ++ch) {
            const double diff = planes[ch][i] - c.intensity[ch];
            dc += diff * diff;
        }
        const double dx = x - c.x, dy = y - c.y, dz = z - c.z;
        return dc + (dx * dx + dy * dy + dz * dz) * spatial_weight;
    };

    std::vector<std::uint32_t> labels(d.voxels(), kUnassigned);
    const double reach = step;
    std::vector<double> best(d.voxels());

    for (int iter = 0; iter < p.max_iter; ++iter) {
        // Assignment: every center scans its +-S window and claims voxels it
        // is strictly closer to. Centers run in index order, so ties go to the
        // lowest center index. Workers own disjoint z ranges.
        parallel_for(static_cast<std::size_t>(d.nz), [&](std::size_t z0, std::size_t z1) {
            const std::size_t plane = static_cast<std::size_t>(d.nx) * d.ny;
            for (std::size_t i = z0 * plane; i < z1 * plane; ++i) {
                best[i] = std::numeric_limits<double>::infinity();
                labels[i] = kUnassigned;
            }
            for (std::uint32_t k = 0; k < k_count; ++k) {
                const auto& c = centers[k];
                const int xa = std::max(0, static_cast<int>(std::ceil(c.x - reach)));
                const int xb = std::min(d.nx - 1, static_cast<int>(std::floor(c.x + reach)));
                const int ya = std::max(0, static_cast<int>(std::ceil(c.y - reach)));
                const int yb = std::min(d.ny - 1, static_cast<int>(std::floor(c.y + reach)));
                const int za = std::max(static_cast<int>(z0), static_cast<int>(std::ceil(c.z - reach)));
                const int zb = std::min(static_cast<int>(z1) - 1, static_cast<int>(std::floor(c.z + reach)));
                for (int z = za; z <= zb; ++z) {
                    for (int y = ya; y <= yb; ++y) {
                        std::size_t i = d.index(xa, y, z);
                        for (int x = xa; x <= xb; ++x, ++i) {
                            const double dist = distance2(c, i, x, y, z);
                            if (dist < best[i]) {
                                best[i] = dist;
                                labels[i] = k;
                            }
                        }
                    }
                }
            }
            // Voxels outside every window fall back to the spatially nearest
            // center.
            for (std::size_t z = z0; z < z1; ++z) {
                for (int y = 0; y < d.ny; ++y) {
                    for (int x = 0; x < d.nx; ++x) {
                        const std::size_t i = d.index(x, y, static_cast<int>(z));
                        if (labels[i] != kUnassigned) continue;
                        double nearest = std::numeric_limits<double>::infinity();
                        for (std::uint32_t k = 0; k < k_count; ++k) {
                            const auto& c = centers[k];
                            const double ds = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) + (z - c.z) * (z - c.z);
                            if (ds < nearest) {
                                nearest = ds;
                                labels[i] = k;
                            }
                        }
                    }
                }
            }
        });
        // Update: per-slice partial sums reduced in slice order so the result
        // does not depend on the worker count.
        const std::size_t stride = 4 + static_cast<std::size_t>(channels);
        std::vector<double> partial(static_cast<std::size_t>(d.nz) * k_count * stride, 0.0);
        parallel_for(static_cast<std::size_t>(d.nz), [&](std::size_t z0, std::size_t z1) {
            for (std::size_t z = z0; z < z1; ++z) {
                double* slab = &partial[z * k_count * stride];
                for (int y = 0; y < d.ny; ++y) {
                    for (int x = 0; x < d.nx; ++x) {
                        const std::size_t i = d.index(x, y, static_cast<int>(z));
                        double* acc = slab + labels[i] * stride;
                        acc[0] += 1.0;
                        acc[1] += x;
                        acc[2] += y;
                        acc[3] += static_cast<double>(z);
                        for (int ch = 0; ch < channels; ++ch) acc[4 + ch] += planes[ch][i];
                    }
                }
            }
        });
        std::vector<double> total(k_count * stride, 0.0);
        for (std::size_t z = 0; z < static_cast<std::size_t>(d.nz); ++z) {
            const double* slab = &partial[z * k_count * stride];
            for (std::size_t j = 0; j < total.size(); ++j) total[j] += slab[j];
        }
        for (std::size_t k = 0; k < k_count; ++k) {
            const double* acc = &total[k * stride];
            auto& c = centers[k];
            c.members = static_cast<std::size_t>(acc[0]);
            if (c.members == 0) continue;
            c.x = acc[1] / acc[0];
            c.y = acc[2] / acc[0];
            c.z = acc[3] / acc[0];
            for (int ch = 0; ch < channels; ++ch) c.intensity[ch] = acc[4 + ch] / acc[0];
        }
    }

    LabelMap raw(d, std::move(labels), v.spacing());
    const double mean_size = static_cast<double>(d.voxels()) / p.n_segments;
    const auto min_size = static_cast<std::size_t>(std::max(1.0, std::floor(p.min_size_factor * mean_size)));
    return enforce_connectivity(raw, min_size);
}

LabelMap enforce_connectivity(const LabelMap& m, std::size_t min_size) {
    const Dims& d = m.dims();
    const std::size_t n = d.voxels();
    const auto labels = m.labels();

    // 6-connected components of equal label, discovered in scan order.
    std::vector<std::uint32_t> comp(n, kUnassigned);
    std::vector<std::vector<std::uint32_t>> members;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (comp[seed] != kUnassigned) continue;
        const auto id = static_cast<std::uint32_t>(members.size());
        members.emplace_back();
        auto& list = members.back();
        comp[seed] = id;
        list.push_back(static_cast<std::uint32_t>(seed));
        for (std::size_t head = 0; head < list.size(); ++head) {
            const auto [x, y, z] = d.coords(list[head]);
            for (const auto& o : kFaceOffsets) {
                const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
                if (!d.contains(nx, ny, nz)) continue;
                const std::size_t j = d.index(nx, ny, nz);
                if (comp[j] == kUnassigned && labels[j] == labels[seed]) {
                    comp[j] = id;
                    list.push_back(static_cast<std::uint32_t>(j));
                }
            }
        }
    }

    const std::size_t count = members.size();
    std::vector<std::uint32_t> parent(count);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };

    // Smallest fragments go first so that speckle is absorbed by its
    // surroundings before larger fragments pick a neighbour. Equal sizes are
    // processed by ascending component id.
    using Entry = std::pair<std::size_t, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pending;
    for (std::uint32_t c = 0; c < count; ++c) {
        if (members[c].size() < min_size) pending.push({members[c].size(), c});
    }
    std::map<std::uint32_t, std::size_t> faces;
    while (!pending.empty()) {
        const auto [size, c] = pending.top();
        pending.pop();
        if (find(c) != c || members[c].size() != size) continue;
        faces.clear();
        for (std::uint32_t i : members[c]) {
            const auto [x, y, z] = d.coords(i);
            for (const auto& o : kFaceOffsets) {
                const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
                if (!d.contains(nx, ny, nz)) continue;
                const std::uint32_t r = find(comp[d.index(nx, ny, nz)]);
                if (r != c) ++faces[r];
            }
        }
        if (faces.empty()) continue;
        std::uint32_t target = faces.begin()->first;
        std::size_t most = faces.begin()->second;
        for (const auto& [r, f] : faces) {
            if (f > most) {
                most = f;
                target = r;
            }
        }
        parent[c] = target;
        auto& dst = members[target];
        dst.insert(dst.end(), members[c].begin(), members[c].end());
        std::vector<std::uint32_t>().swap(members[c]);
        if (dst.size() < min_size) pending.push({dst.size(), target});
    }

    LabelMap out(d, m.spacing());
    auto out_labels = out.labels();
    for (std::size_t i = 0; i < n; ++i) out_labels[i] = find(comp[i]);
    compact_labels(out);
    return out;
}

}  // namespace svx
