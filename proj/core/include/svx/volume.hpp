#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace svx {

struct Dims {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    std::size_t voxels() const noexcept {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
    }
    std::size_t index(int x, int y, int z) const noexcept {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
    }
    std::array<int, 3> coords(std::size_t i) const noexcept {
        const auto sx = static_cast<std::size_t>(nx);
        const auto sy = static_cast<std::size_t>(ny);
        return {static_cast<int>(i % sx), static_cast<int>((i / sx) % sy), static_cast<int>(i / (sx * sy))};
    }
    bool contains(int x, int y, int z) const noexcept {
        return x >= 0 && y >= 0 && z >= 0 && x < nx && y < ny && z < nz;
    }
    int operator[](int axis) const noexcept { return axis == 0 ? nx : axis == 1 ? ny : nz; }

    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Physical voxel size in millimetres.
struct Spacing {
    double sx = 1.0;
    double sy = 1.0;
    double sz = 1.0;

    double operator[](int axis) const noexcept { return axis == 0 ? sx : axis == 1 ? sy : sz; }
    friend bool operator==(const Spacing&, const Spacing&) = default;
};

/// Multi-channel scalar volume. Samples are stored channel-major with x
/// varying fastest inside each channel.
class Volume {
public:
    Volume() = default;
    Volume(Dims dims, int channels, Spacing spacing = {});
    Volume(Dims dims, int channels, std::vector<float> data, Spacing spacing = {});

    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    int channels() const noexcept { return channels_; }
    std::size_t voxels() const noexcept { return dims_.voxels(); }

    std::span<const float> channel(int c) const;
    std::span<float> channel(int c);
    std::span<const float> data() const noexcept { return data_; }
    std::span<float> data() noexcept { return data_; }

    float at(int c, int x, int y, int z) const { return channel(c)[dims_.index(x, y, z)]; }

    /// New volume holding only the listed channels, in order.
    Volume select_channels(std::span<const int> channels) const;

    friend bool operator==(const Volume&, const Volume&) = default;

private:
    Dims dims_;
    Spacing spacing_;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Dense integer label field. Used both for supervoxel maps and for binary
/// masks (labels in {0, 1}).
class LabelMap {
public:
    LabelMap() = default;
    explicit LabelMap(Dims dims, Spacing spacing = {}, std::uint32_t fill = 0);
    LabelMap(Dims dims, std::vector<std::uint32_t> labels, Spacing spacing = {});

    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    void set_spacing(Spacing s);
    std::size_t voxels() const noexcept { return labels_.size(); }

    std::span<const std::uint32_t> labels() const noexcept { return labels_; }
    std::span<std::uint32_t> labels() noexcept { return labels_; }
    std::uint32_t operator[](std::size_t i) const noexcept { return labels_[i]; }
    std::uint32_t& operator[](std::size_t i) noexcept { return labels_[i]; }
    std::uint32_t at(int x, int y, int z) const { return labels_[dims_.index(x, y, z)]; }

    /// Largest label plus one (0 for an empty map).
    std::uint32_t label_count() const noexcept;
    /// Number of nonzero voxels.
    std::size_t foreground() const noexcept;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    Dims dims_;
    Spacing spacing_;
    std::vector<std::uint32_t> labels_;
};

/// Renumbers labels to 0..K-1 in order of first appearance (x-fastest scan).
/// Returns K.
std::uint32_t compact_labels(LabelMap& map);

/// Throws ParamError unless the dims describe a non-empty 3D grid.
void check_dims(const Dims& dims);
/// Throws ParamError unless every spacing component is finite and positive.
void check_spacing(const Spacing& spacing);

}  // namespace svx
