// Slow, direct reimplementations used as references by the unit and
// acceptance tests. Nothing here shares code with the library beyond the
// plain data types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "svx/features.hpp"
#include "svx/volume.hpp"

namespace oracle {

using svx::Dims;
using svx::LabelMap;
using svx::Volume;

inline constexpr int kSix[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : v > hi ? hi : v; }

// Full 3D convolution with the product kernel, edge replication.
inline std::vector<double> dense_gaussian(const Volume& v, int channel, double sigma) {
    const Dims& d = v.dims();
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * r + 1);
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) sum += w[t + r] = std::exp(-0.5 * t * t / (sigma * sigma));
    for (auto& x : w) x /= sum;
    const auto f = v.channel(channel);
    std::vector<double> out(d.voxels());
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                double acc = 0.0;
                for (int c = -r; c <= r; ++c)
                    for (int b = -r; b <= r; ++b)
                        for (int a = -r; a <= r; ++a) {
                            const std::size_t j = d.index(clampi(x + a, 0, d.nx - 1), clampi(y + b, 0, d.ny - 1),
                                                          clampi(z + c, 0, d.nz - 1));
                            acc += w[a + r] * w[b + r] * w[c + r] * f[j];
                        }
                out[d.index(x, y, z)] = acc;
            }
    return out;
}

struct Grad {
    std::vector<float> gx, gy, gz;
};

// Central differences inside, one-sided on faces, 0 on axes of extent 1.
inline Grad fd_gradient(const Volume& v, int channel) {
    const Dims& d = v.dims();
    const auto f = v.channel(channel);
    Grad g{std::vector<float>(d.voxels()), std::vector<float>(d.voxels()), std::vector<float>(d.voxels())};
    auto diff = [&](int x, int y, int z, int axis) -> float {
        const int n = d[axis];
        if (n == 1) return 0.0f;
        int c[3] = {x, y, z};
        const int p = c[axis];
        int lo[3] = {x, y, z}, hi[3] = {x, y, z};
        if (p == 0) {
            hi[axis] = 1;
            return f[d.index(hi[0], hi[1], hi[2])] - f[d.index(x, y, z)];
        }
        if (p == n - 1) {
            lo[axis] = n - 2;
            return f[d.index(x, y, z)] - f[d.index(lo[0], lo[1], lo[2])];
        }
        lo[axis] = p - 1;
        hi[axis] = p + 1;
        return (f[d.index(hi[0], hi[1], hi[2])] - f[d.index(lo[0], lo[1], lo[2])]) * 0.5f;
    };
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const auto i = d.index(x, y, z);
                g.gx[i] = diff(x, y, z, 0);
                g.gy[i] = diff(x, y, z, 1);
                g.gz[i] = diff(x, y, z, 2);
            }
    return g;
}

inline int bin_of(double x, double lo, double hi, int bins) {
    if (!(hi > lo)) return 0;
    return clampi(static_cast<int>(std::floor((x - lo) / (hi - lo) * bins)), 0, bins - 1);
}

// Features of the voxel set `voxels` computed from scratch: two-pass
// moments, histograms over the channel's global range and a co-occurrence
// matrix built by visiting every face neighbour of every voxel.
inline std::vector<double> region_features(const Volume& v, const std::vector<std::size_t>& voxels,
                                           const std::vector<int>& channels, const std::vector<bool>& inside) {
    namespace fi = svx::feature_index;
    const Dims& d = v.dims();
    std::vector<double> out;
    for (int ch : channels) {
        std::vector<double> block(svx::kFeaturesPerChannel, 0.0);
        const auto f = v.channel(ch);
        const auto g = fd_gradient(v, ch);
        double lo = f[0], hi = f[0], gmax = 0.0;
        std::vector<double> mag(d.voxels());
        for (std::size_t i = 0; i < d.voxels(); ++i) {
            lo = std::min<double>(lo, f[i]);
            hi = std::max<double>(hi, f[i]);
            const double gx = g.gx[i], gy = g.gy[i], gz = g.gz[i];
            mag[i] = std::sqrt(gx * gx + gy * gy + gz * gz);
            gmax = std::max(gmax, mag[i]);
        }
        const double n = static_cast<double>(voxels.size());
        double mean = 0.0;
        for (auto i : voxels) mean += f[i];
        mean /= n;
        double m2 = 0.0, m3 = 0.0;
        for (auto i : voxels) {
            const double t = f[i] - mean;
            m2 += t * t;
            m3 += t * t * t;
        }
        const double var = m2 / n;
        block[fi::kMean] = mean;
        block[fi::kVariance] = var;
        block[fi::kSkewness] = var > 0.0 ? (m3 / n) / std::pow(var, 1.5) : 0.0;

        std::vector<double> ori(10, 0.0), magh(10, 0.0);
        double ori_total = 0.0, mag_total = 0.0;
        std::vector<double> glcm(16 * 16, 0.0);
        double pairs = 0.0;
        for (auto i : voxels) {
            block[fi::kIntensityHistogram + bin_of(f[i], lo, hi, 10)] += 1.0 / n;
            if (mag[i] > 0.0) {
                const double angle = std::acos(std::clamp(static_cast<double>(g.gz[i]) / mag[i], -1.0, 1.0));
                ori[bin_of(angle, 0.0, std::numbers::pi, 10)] += mag[i];
                ori_total += mag[i];
                magh[bin_of(mag[i], 0.0, gmax, 10)] += 1.0;
                mag_total += 1.0;
            }
            const auto [x, y, z] = d.coords(i);
            for (const auto& o : kSix) {
                const int a = x + o[0], b = y + o[1], c = z + o[2];
                if (!d.contains(a, b, c)) continue;
                const auto j = d.index(a, b, c);
                if (!inside[j]) continue;
                glcm[bin_of(f[i], lo, hi, 16) * 16 + bin_of(f[j], lo, hi, 16)] += 1.0;
                pairs += 1.0;
            }
        }
        for (int b = 0; b < 10; ++b) {
            if (ori_total > 0.0) block[fi::kOrientationHistogram + b] = ori[b] / ori_total;
            if (mag_total > 0.0) block[fi::kMagnitudeHistogram + b] = magh[b] / mag_total;
        }
        if (pairs == 0.0) {
            block[fi::kGlcmEnergy] = 1.0;
        } else {
            for (int a = 0; a < 16; ++a)
                for (int b = 0; b < 16; ++b) {
                    const double p = glcm[a * 16 + b] / pairs;
                    if (p == 0.0) continue;
                    block[fi::kGlcmContrast] += p * (a - b) * (a - b);
                    block[fi::kGlcmEnergy] += p * p;
                    block[fi::kGlcmEntropy] -= p * std::log(p);
                }
        }
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

inline std::vector<std::vector<double>> features(const Volume& v, const LabelMap& sp, const std::vector<int>& channels) {
    const std::uint32_t k = sp.label_count();
    std::vector<std::vector<double>> out;
    for (std::uint32_t s = 0; s < k; ++s) {
        std::vector<std::size_t> vox;
        std::vector<bool> inside(sp.voxels(), false);
        for (std::size_t i = 0; i < sp.voxels(); ++i)
            if (sp[i] == s) {
                vox.push_back(i);
                inside[i] = true;
            }
        out.push_back(region_features(v, vox, channels, inside));
    }
    return out;
}

struct RagScan {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> faces;  // a < b
    std::vector<std::uint64_t> boundary;
};

// Every voxel looks at all six neighbours; a pair is recorded from the side
// of its smaller label only.
inline RagScan rag(const LabelMap& sp) {
    const Dims& d = sp.dims();
    RagScan r;
    r.boundary.assign(sp.label_count(), 0);
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const auto a = sp.at(x, y, z);
                for (const auto& o : kSix) {
                    const int p = x + o[0], q = y + o[1], s = z + o[2];
                    if (!d.contains(p, q, s)) {
                        ++r.boundary[a];
                        continue;
                    }
                    const auto b = sp.at(p, q, s);
                    if (b == a) continue;
                    ++r.boundary[a];
                    if (a < b) ++r.faces[{a, b}];
                }
            }
    return r;
}

inline std::vector<std::uint32_t> neighbours(const LabelMap& sp, const std::vector<std::uint32_t>& members) {
    const std::set<std::uint32_t> m(members.begin(), members.end());
    std::set<std::uint32_t> out;
    const Dims& d = sp.dims();
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                if (!m.count(sp.at(x, y, z))) continue;
                for (const auto& o : kSix) {
                    const int p = x + o[0], q = y + o[1], s = z + o[2];
                    if (d.contains(p, q, s) && !m.count(sp.at(p, q, s))) out.insert(sp.at(p, q, s));
                }
            }
    return {out.begin(), out.end()};
}

inline std::uint64_t shared_border(const LabelMap& sp, const std::vector<std::uint32_t>& members, std::uint32_t cand) {
    const std::set<std::uint32_t> m(members.begin(), members.end());
    const Dims& d = sp.dims();
    std::uint64_t n = 0;
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                if (sp.at(x, y, z) != cand) continue;
                for (const auto& o : kSix) {
                    const int p = x + o[0], q = y + o[1], s = z + o[2];
                    if (d.contains(p, q, s) && m.count(sp.at(p, q, s))) ++n;
                }
            }
    return n;
}

// Increase in the error sum of squares when two clusters, each represented
// by `n` coincident points at its mean, are pooled.
inline double ward(const std::vector<double>& a, std::uint64_t na, const std::vector<double>& b, std::uint64_t nb) {
    const double n = static_cast<double>(na + nb);
    double ess = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double m = (static_cast<double>(na) * a[k] + static_cast<double>(nb) * b[k]) / n;
        ess += static_cast<double>(na) * (a[k] - m) * (a[k] - m) + static_cast<double>(nb) * (b[k] - m) * (b[k] - m);
    }
    return ess;
}

// Number of 6-connected components of each label.
inline std::vector<int> components_per_label(const LabelMap& m) {
    const Dims& d = m.dims();
    std::vector<int> count(m.label_count(), 0);
    std::vector<bool> seen(m.voxels(), false);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < m.voxels(); ++s) {
        if (seen[s]) continue;
        ++count[m[s]];
        seen[s] = true;
        stack.push_back(s);
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            const auto [x, y, z] = d.coords(i);
            for (const auto& o : kSix) {
                const int p = x + o[0], q = y + o[1], r = z + o[2];
                if (!d.contains(p, q, r)) continue;
                const auto j = d.index(p, q, r);
                if (!seen[j] && m[j] == m[i]) {
                    seen[j] = true;
                    stack.push_back(j);
                }
            }
        }
    }
    return count;
}

inline std::vector<std::size_t> surface(const LabelMap& m) {
    const Dims& d = m.dims();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.voxels(); ++i) {
        if (!m[i]) continue;
        const auto [x, y, z] = d.coords(i);
        for (const auto& o : kSix) {
            const int p = x + o[0], q = y + o[1], r = z + o[2];
            if (!d.contains(p, q, r) || !m.at(p, q, r)) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

inline double pct95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double rank = 0.95 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (rank - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// All-pairs surface distances.
inline double hd95(const LabelMap& a, const LabelMap& b, const svx::Spacing& sp) {
    const Dims& d = a.dims();
    const auto sa = surface(a), sb = surface(b);
    auto directed = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
        std::vector<double> out;
        for (auto i : from) {
            const auto p = d.coords(i);
            double best = std::numeric_limits<double>::infinity();
            for (auto j : to) {
                const auto q = d.coords(j);
                const double dx = (p[0] - q[0]) * sp.sx, dy = (p[1] - q[1]) * sp.sy, dz = (p[2] - q[2]) * sp.sz;
                best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
            }
            out.push_back(best);
        }
        return pct95(out);
    };
    return std::max(directed(sa, sb), directed(sb, sa));
}

struct Overlap {
    std::size_t a = 0, b = 0, both = 0, either = 0;
};

inline Overlap overlap(const LabelMap& a, const LabelMap& b) {
    Overlap o;
    for (std::size_t i = 0; i < a.voxels(); ++i) {
        const bool x = a[i] != 0, y = b[i] != 0;
        o.a += x;
        o.b += y;
        o.both += x && y;
        o.either += x || y;
    }
    return o;
}

// Random helpers --------------------------------------------------------

inline Volume random_volume(std::mt19937_64& rng, Dims d, int channels) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> data(d.voxels() * static_cast<std::size_t>(channels));
    for (auto& x : data) x = u(rng);
    return Volume(d, channels, std::move(data));
}

// Piecewise-constant blocks with random relabelling, then compacted so every
// id in 0..K-1 is present. Labels need not be connected.
inline LabelMap random_labels(std::mt19937_64& rng, Dims d, int block, int labels) {
    std::uniform_int_distribution<int> pick(0, labels - 1);
    std::map<std::array<int, 3>, int> cell;
    LabelMap m(d);
    for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y)
            for (int x = 0; x < d.nx; ++x) {
                const std::array<int, 3> key{x / block, y / block, z / block};
                auto it = cell.find(key);
                if (it == cell.end()) it = cell.emplace(key, pick(rng)).first;
                m[d.index(x, y, z)] = static_cast<std::uint32_t>(it->second);
            }
    std::bernoulli_distribution flip(0.08);
    for (std::size_t i = 0; i < m.voxels(); ++i)
        if (flip(rng)) m[i] = static_cast<std::uint32_t>(pick(rng));
    svx::compact_labels(m);
    return m;
}

inline LabelMap random_mask(std::mt19937_64& rng, Dims d, double density) {
    std::bernoulli_distribution on(density);
    LabelMap m(d);
    for (std::size_t i = 0; i < m.voxels(); ++i) m[i] = on(rng) ? 1u : 0u;
    return m;
}

inline bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace oracle
