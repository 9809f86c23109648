#include "svx/filters.hpp"

#include <algorithm>
#include <span>

#include "svx/errors.hpp"
#include "svx/parallel.hpp"

namespace svx {

std::vector<double> gaussian_kernel(double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0) throw ParamError("sigma must be finite and >= 0");
    if (sigma == 0.0) return {1.0};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * static_cast<std::size_t>(radius) + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
        taps[static_cast<std::size_t>(k + radius)] = w;
        sum += w;
    }
    for (auto& w : taps) w /= sum;
    return taps;
}

namespace {

// Convolves `src` along one axis into `dst`, clamping sample coordinates.
void convolve_axis(std::span<const double> src, std::span<double> dst, const Dims& d, int axis,
                   const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size() / 2);
    const int extent = d[axis];
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? static_cast<std::size_t>(d.nx)
                                                         : static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(d.ny);
    // Lines along `axis` are indexed by the other two coordinates.
    const int a1 = axis == 0 ? 1 : 0;
    const int a2 = axis == 2 ? 1 : 2;
    const std::size_t lines = static_cast<std::size_t>(d[a1]) * static_cast<std::size_t>(d[a2]);
    parallel_for(lines, [&](std::size_t begin, std::size_t end) {
        for (std::size_t line = begin; line < end; ++line) {
            int c[3] = {0, 0, 0};
            c[a1] = static_cast<int>(line % static_cast<std::size_t>(d[a1]));
            c[a2] = static_cast<int>(line / static_cast<std::size_t>(d[a1]));
            const std::size_t base = d.index(c[0], c[1], c[2]);
            for (int i = 0; i < extent; ++i) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    const int j = std::clamp(i + k, 0, extent - 1);
                    acc += taps[static_cast<std::size_t>(k + radius)] * src[base + static_cast<std::size_t>(j) * stride];
                }
                dst[base + static_cast<std::size_t>(i) * stride] = acc;
            }
        }
    });
}

}  // namespace

Volume gaussian_smooth(const Volume& v, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    if (sigma == 0.0) return v;
    Volume out(v.dims(), v.channels(), v.spacing());
    const std::size_t n = v.voxels();
    std::vector<double> a(n), b(n);
    for (int c = 0; c < v.channels(); ++c) {
        auto src = v.channel(c);
        std::copy(src.begin(), src.end(), a.begin());
        convolve_axis(a, b, v.dims(), 0, taps);
        convolve_axis(b, a, v.dims(), 1, taps);
        convolve_axis(a, b, v.dims(), 2, taps);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(b[i]);
    }
    return out;
}

GradientField gradient_field(const Volume& v, int channel) {
    const auto f = v.channel(channel);
    const Dims& d = v.dims();
    GradientField g{d, std::vector<float>(d.voxels()), std::vector<float>(d.voxels()), std::vector<float>(d.voxels())};

    auto diff = [&](int x, int y, int z, int axis) -> float {
        int c[3] = {x, y, z};
        const int extent = d[axis];
        if (extent == 1) return 0.0f;
        int lo[3] = {x, y, z};
        int hi[3] = {x, y, z};
        if (c[axis] == 0) {
            hi[axis] = 1;
            return f[d.index(hi[0], hi[1], hi[2])] - f[d.index(lo[0], lo[1], lo[2])];
        }
        if (c[axis] == extent - 1) {
            lo[axis] = extent - 2;
            return f[d.index(hi[0], hi[1], hi[2])] - f[d.index(lo[0], lo[1], lo[2])];
        }
        lo[axis] -= 1;
        hi[axis] += 1;
        return (f[d.index(hi[0], hi[1], hi[2])] - f[d.index(lo[0], lo[1], lo[2])]) * 0.5f;
    };

    parallel_for(static_cast<std::size_t>(d.nz), [&](std::size_t z0, std::size_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < d.ny; ++y) {
                for (int x = 0; x < d.nx; ++x) {
                    const std::size_t i = d.index(x, y, z);
                    g.gx[i] = diff(x, y, z, 0);
                    g.gy[i] = diff(x, y, z, 1);
                    g.gz[i] = diff(x, y, z, 2);
                }
            }
        }
    });
    return g;
}

}  // namespace svx
