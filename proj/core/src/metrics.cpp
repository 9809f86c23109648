#include "svx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svx/errors.hpp"
#include "svx/parallel.hpp"

namespace svx {
namespace {

struct Overlap {
    std::size_t a = 0, b = 0, both = 0;
};

Overlap overlap(const LabelMap& a, const LabelMap& b) {
    if (a.dims() != b.dims()) throw ParamError("mask dims differ");
    Overlap o;
    const auto la = a.labels(), lb = b.labels();
    for (std::size_t i = 0; i < la.size(); ++i) {
        const bool fa = la[i] != 0, fb = lb[i] != 0;
        o.a += fa;
        o.b += fb;
        o.both += fa && fb;
    }
    return o;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact 1D lower envelope of parabolas (Felzenszwalb & Huttenlocher) over
// samples placed `step` apart.
void envelope_1d(const std::vector<double>& f, std::vector<double>& out, double step, std::vector<int>& v,
                 std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    v.assign(static_cast<std::size_t>(n), 0);
    z.assign(static_cast<std::size_t>(n) + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        const double xq = q * step;
        while (k >= 0) {
            const int p = v[k];
            const double xp = p * step;
            const double s = ((f[q] + xq * xq) - (f[p] + xp * xp)) / (2.0 * (xq - xp));
            if (s <= z[k]) {
                --k;
            } else {
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = kInf;
                break;
            }
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        }
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        const double xq = q * step;
        while (z[j + 1] < xq) ++j;
        const double dx = xq - v[j] * step;
        out[q] = dx * dx + f[v[j]];
    }
}

}  // namespace

double dsc(const LabelMap& a, const LabelMap& b) {
    const auto o = overlap(a, b);
    if (o.a + o.b == 0) return 1.0;
    return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

double iou(const LabelMap& a, const LabelMap& b) {
    const auto o = overlap(a, b);
    const std::size_t uni = o.a + o.b - o.both;
    if (uni == 0) return 1.0;
    return static_cast<double>(o.both) / static_cast<double>(uni);
}

std::vector<std::size_t> surface_voxels(const LabelMap& mask) {
    const Dims& d = mask.dims();
    const auto l = mask.labels();
    std::vector<std::size_t> out;
    static constexpr int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
    for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
            for (int x = 0; x < d.nx; ++x) {
                const std::size_t i = d.index(x, y, z);
                if (l[i] == 0) continue;
                for (const auto& o : offsets) {
                    const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
                    if (!d.contains(nx, ny, nz) || l[d.index(nx, ny, nz)] == 0) {
                        out.push_back(i);
                        break;
                    }
                }
            }
        }
    }
    return out;
}

std::vector<double> squared_distance_transform(const Dims& d, const Spacing& spacing, const std::vector<bool>& features) {
    if (features.size() != d.voxels()) throw ParamError("feature mask size does not match dims");
    std::vector<double> dist(d.voxels());
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = features[i] ? 0.0 : kInf;

    for (int axis = 0; axis < 3; ++axis) {
        const int extent = d[axis];
        const int a1 = axis == 0 ? 1 : 0;
        const int a2 = axis == 2 ? 1 : 2;
        const std::size_t lines = static_cast<std::size_t>(d[a1]) * static_cast<std::size_t>(d[a2]);
        parallel_for(lines, [&](std::size_t begin, std::size_t end) {
            std::vector<double> f(static_cast<std::size_t>(extent)), out(static_cast<std::size_t>(extent)), z;
            std::vector<int> v;
            for (std::size_t line = begin; line < end; ++line) {
                int c[3] = {0, 0, 0};
                c[a1] = static_cast<int>(line % static_cast<std::size_t>(d[a1]));
                c[a2] = static_cast<int>(line / static_cast<std::size_t>(d[a1]));
                for (int i = 0; i < extent; ++i) {
                    c[axis] = i;
                    f[i] = dist[d.index(c[0], c[1], c[2])];
                }
                envelope_1d(f, out, spacing[axis], v, z);
                for (int i = 0; i < extent; ++i) {
                    c[axis] = i;
                    dist[d.index(c[0], c[1], c[2])] = out[i];
                }
            }
        });
    }
    return dist;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ParamError("percentile of an empty sample");
    if (!(q >= 0.0 && q <= 100.0)) throw ParamError("percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double hd95(const LabelMap& a, const LabelMap& b, const Spacing& spacing) {
    if (a.dims() != b.dims()) throw ParamError("mask dims differ");
    check_spacing(spacing);
    const auto sa = surface_voxels(a);
    const auto sb = surface_voxels(b);
    if (sa.empty() || sb.empty()) throw EmptyMaskError("hd95 needs two non-empty masks");

    auto directed = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
        std::vector<bool> features(a.dims().voxels(), false);
        for (auto i : to) features[i] = true;
        const auto dt = squared_distance_transform(a.dims(), spacing, features);
        std::vector<double> distances;
        distances.reserve(from.size());
        for (auto i : from) distances.push_back(std::sqrt(dt[i]));
        return percentile(std::move(distances), 95.0);
    };
    return std::max(directed(sa, sb), directed(sb, sa));
}

MetricsReport evaluate(const LabelMap& pred, const LabelMap& gt) {
    MetricsReport r;
    r.dsc = dsc(pred, gt);
    r.iou = iou(pred, gt);
    r.hd95_mm = hd95(pred, gt, gt.spacing());
    r.pred_voxels = pred.foreground();
    r.gt_voxels = gt.foreground();
    return r;
}

}  // namespace svx
