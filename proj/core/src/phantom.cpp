#include "svx/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "svx/errors.hpp"
#include "svx/parallel.hpp"
#include "svx/rng.hpp"

namespace svx {
namespace {

struct Ellipsoid {
    double cx, cy, cz;
    double ax, ay, az;
    double angle;  // rotation about z

    bool contains(double x, double y, double z, double scale = 1.0) const {
        const double dx = x - cx, dy = y - cy, dz = z - cz;
        const double c = std::cos(angle), s = std::sin(angle);
        const double u = (c * dx + s * dy) / (ax * scale);
        const double v = (-s * dx + c * dy) / (ay * scale);
        const double w = dz / (az * scale);
        return u * u + v * v + w * w <= 1.0;
    }
};

constexpr double kCoreScale = 0.6;

constexpr int kFaces[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

std::vector<std::array<int, 3>> ball(int radius) {
    std::vector<std::array<int, 3>> offsets;
    for (int z = -radius; z <= radius; ++z)
        for (int y = -radius; y <= radius; ++y)
            for (int x = -radius; x <= radius; ++x)
                if (x * x + y * y + z * z <= radius * radius) offsets.push_back({x, y, z});
    return offsets;
}

LabelMap morphology(const LabelMap& mask, int radius, bool erode) {
    const Dims& d = mask.dims();
    const auto in = mask.labels();
    const auto se = ball(radius);
    LabelMap out(d, mask.spacing());
    auto o = out.labels();
    parallel_for(static_cast<std::size_t>(d.nz), [&](std::size_t z0, std::size_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < d.ny; ++y) {
                for (int x = 0; x < d.nx; ++x) {
                    bool value = erode;
                    for (const auto& s : se) {
                        const int nx = x + s[0], ny = y + s[1], nz = z + s[2];
                        const bool fg = d.contains(nx, ny, nz) && in[d.index(nx, ny, nz)] != 0;
                        if (erode && !fg) {
                            value = false;
                            break;
                        }
                        if (!erode && fg) {
                            value = true;
                            break;
                        }
                    }
                    o[d.index(x, y, z)] = value ? 1u : 0u;
                }
            }
        }
    });
    return out;
}

LabelMap drop_components(const LabelMap& mask, double fraction) {
    const Dims& d = mask.dims();
    const auto in = mask.labels();
    std::vector<int> comp(d.voxels(), -1);
    std::vector<std::vector<std::size_t>> comps;
    for (std::size_t seed = 0; seed < d.voxels(); ++seed) {
        if (in[seed] == 0 || comp[seed] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        comps.push_back({seed});
        comp[seed] = id;
        auto& list = comps.back();
        for (std::size_t head = 0; head < list.size(); ++head) {
            const auto [x, y, z] = d.coords(list[head]);
            for (const auto& f : kFaces) {
                const int nx = x + f[0], ny = y + f[1], nz = z + f[2];
                if (!d.contains(nx, ny, nz)) continue;
                const std::size_t j = d.index(nx, ny, nz);
                if (in[j] != 0 && comp[j] < 0) {
                    comp[j] = id;
                    list.push_back(j);
                }
            }
        }
    }
    std::vector<std::size_t> order(comps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return comps[a].size() < comps[b].size(); });

    const double budget = fraction * static_cast<double>(mask.foreground());
    LabelMap out = mask;
    std::size_t removed = 0;
    std::size_t remaining = comps.size();
    for (auto c : order) {
        if (remaining <= 1 || static_cast<double>(removed + comps[c].size()) > budget) break;
        for (auto i : comps[c]) out[i] = 0;
        removed += comps[c].size();
        --remaining;
    }
    return out;
}

LabelMap boundary_noise(const LabelMap& mask, double probability, std::uint64_t seed) {
    const Dims& d = mask.dims();
    const auto in = mask.labels();
    const CounterRng rng = CounterRng(seed).split(0xB0u);
    LabelMap out = mask;
    for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
            for (int x = 0; x < d.nx; ++x) {
                const std::size_t i = d.index(x, y, z);
                const bool fg = in[i] != 0;
                bool boundary = false;
                for (const auto& f : kFaces) {
                    const int nx = x + f[0], ny = y + f[1], nz = z + f[2];
                    if (d.contains(nx, ny, nz) && (in[d.index(nx, ny, nz)] != 0) != fg) {
                        boundary = true;
                        break;
                    }
                }
                if (boundary && rng.uniform(i) < probability) out[i] = fg ? 0u : 1u;
            }
        }
    }
    return out;
}

}  // namespace

void PhantomParams::validate() const {
    if (dims.nx < 16 || dims.ny < 16 || dims.nz < 16) throw ParamError("phantom dims must be at least 16 per axis");
    if (wt_blobs < 1) throw ParamError("wt_blobs must be >= 1");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ParamError("noise_sigma must be >= 0");
    if (!(bias_amplitude >= 0.0 && bias_amplitude < 1.0)) throw ParamError("bias_amplitude must be in [0, 1)");
    if (!std::isfinite(background)) throw ParamError("background must be finite");
}

Phantom generate_phantom(const PhantomParams& p) {
    p.validate();
    const Dims& d = p.dims;
    const CounterRng root(p.seed);
    CounterRng shape = root.split(1);

    const double extent = std::min({d.nx, d.ny, d.nz});
    std::vector<Ellipsoid> blobs;
    {
        Ellipsoid e{};
        e.cx = (d.nx - 1) / 2.0 + shape.next_uniform(-0.08, 0.08) * d.nx;
        e.cy = (d.ny - 1) / 2.0 + shape.next_uniform(-0.08, 0.08) * d.ny;
        e.cz = (d.nz - 1) / 2.0 + shape.next_uniform(-0.08, 0.08) * d.nz;
        e.ax = shape.next_uniform(0.24, 0.32) * extent;
        e.ay = shape.next_uniform(0.24, 0.32) * extent;
        e.az = shape.next_uniform(0.24, 0.32) * extent;
        e.angle = shape.next_uniform(0.0, std::numbers::pi);
        blobs.push_back(e);
    }
    const double reach = (blobs[0].ax + blobs[0].ay + blobs[0].az) / 3.0;
    for (int b = 1; b < p.wt_blobs; ++b) {
        // Satellite lobes attached to the main blob at a random direction.
        const double theta = std::acos(shape.next_uniform(-1.0, 1.0));
        const double phi = shape.next_uniform(0.0, 2.0 * std::numbers::pi);
        const double r = shape.next_uniform(0.5, 0.9) * reach;
        Ellipsoid e{};
        e.cx = blobs[0].cx + r * std::sin(theta) * std::cos(phi);
        e.cy = blobs[0].cy + r * std::sin(theta) * std::sin(phi);
        e.cz = blobs[0].cz + r * std::cos(theta);
        e.ax = shape.next_uniform(0.14, 0.22) * extent;
        e.ay = shape.next_uniform(0.14, 0.22) * extent;
        e.az = shape.next_uniform(0.14, 0.22) * extent;
        e.angle = shape.next_uniform(0.0, std::numbers::pi);
        blobs.push_back(e);
    }

    LabelMap wt(d), tc(d);
    for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
            for (int x = 0; x < d.nx; ++x) {
                const std::size_t i = d.index(x, y, z);
                bool in_wt = false;
                for (const auto& e : blobs) in_wt = in_wt || e.contains(x, y, z);
                wt[i] = in_wt ? 1u : 0u;
                tc[i] = in_wt && blobs[0].contains(x, y, z, kCoreScale) ? 1u : 0u;
            }
        }
    }

    CounterRng bias = root.split(2);
    const double phase[3] = {bias.next_uniform(0.0, 2.0 * std::numbers::pi), bias.next_uniform(0.0, 2.0 * std::numbers::pi),
                             bias.next_uniform(0.0, 2.0 * std::numbers::pi)};

    Volume vol(d, phantom_channel::kCount);
    for (int c = 0; c < phantom_channel::kCount; ++c) {
        const CounterRng noise = root.split(100 + static_cast<std::uint64_t>(c));
        const float levels[3] = {static_cast<float>(p.background), static_cast<float>(p.background + p.contrast[c].edema),
                                 static_cast<float>(p.background + p.contrast[c].core)};
        auto out = vol.channel(c);
        for (int z = 0; z < d.nz; ++z) {
            for (int y = 0; y < d.ny; ++y) {
                for (int x = 0; x < d.nx; ++x) {
                    const std::size_t i = d.index(x, y, z);
                    const int level = tc[i] ? 2 : wt[i] ? 1 : 0;
                    double value = levels[level];
                    if (p.bias_amplitude > 0.0) {
                        const double field = (std::sin(2.0 * std::numbers::pi * x / d.nx + phase[0]) +
                                               std::sin(2.0 * std::numbers::pi * y / d.ny + phase[1]) +
                                               std::sin(2.0 * std::numbers::pi * z / d.nz + phase[2])) /
                                              3.0;
                        value *= 1.0 + p.bias_amplitude * field;
                    }
                    if (p.noise_sigma > 0.0) value += p.noise_sigma * noise.normal(i);
                    out[i] = static_cast<float>(value);
                }
            }
        }
    }
    return {std::move(vol), std::move(wt), std::move(tc)};
}

CorruptionMode parse_corruption_mode(const std::string& name) {
    if (name == "erode") return CorruptionMode::Erode;
    if (name == "dilate") return CorruptionMode::Dilate;
    if (name == "drop_components") return CorruptionMode::DropComponents;
    if (name == "boundary_noise") return CorruptionMode::BoundaryNoise;
    throw ParamError("unknown corruption mode '" + name + "'");
}

const char* to_string(CorruptionMode mode) {
    switch (mode) {
        case CorruptionMode::Erode: return "erode";
        case CorruptionMode::Dilate: return "dilate";
        case CorruptionMode::DropComponents: return "drop_components";
        case CorruptionMode::BoundaryNoise: return "boundary_noise";
    }
    return "?";
}

LabelMap corrupt_seed(const LabelMap& mask, CorruptionMode mode, double magnitude, std::uint64_t seed) {
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) throw ParamError("corruption magnitude must be >= 0");
    if (mask.foreground() == 0) throw EmptySeedError("cannot corrupt an empty mask");
    LabelMap out;
    switch (mode) {
        case CorruptionMode::Erode:
        case CorruptionMode::Dilate: {
            const int radius = static_cast<int>(std::lround(magnitude));
            if (radius == 0) {
                out = mask;
                for (auto& l : out.labels()) l = l != 0 ? 1u : 0u;
            } else {
                out = morphology(mask, radius, mode == CorruptionMode::Erode);
            }
            break;
        }
        case CorruptionMode::DropComponents:
            out = drop_components(mask, magnitude);
            break;
        case CorruptionMode::BoundaryNoise:
            out = boundary_noise(mask, magnitude, seed);
            break;
    }
    if (out.foreground() == 0) throw EmptySeedError(std::string(to_string(mode)) + " corruption emptied the mask");
    return out;
}

}  // namespace svx
