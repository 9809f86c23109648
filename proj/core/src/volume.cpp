#include "svx/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "svx/errors.hpp"

namespace svx {

void check_dims(const Dims& dims) {
    if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) {
        throw ParamError("dimensions must be positive, got " + std::to_string(dims.nx) + "x" +
                         std::to_string(dims.ny) + "x" + std::to_string(dims.nz));
    }
}

void check_spacing(const Spacing& s) {
    for (int a = 0; a < 3; ++a) {
        if (!std::isfinite(s[a]) || s[a] <= 0.0) throw ParamError("voxel spacing must be finite and positive");
    }
}

Volume::Volume(Dims dims, int channels, Spacing spacing)
    : dims_(dims), spacing_(spacing), channels_(channels) {
    check_dims(dims);
    check_spacing(spacing);
    if (channels < 1) throw ParamError("a volume needs at least one channel");
    data_.assign(static_cast<std::size_t>(channels) * dims.voxels(), 0.0f);
}

Volume::Volume(Dims dims, int channels, std::vector<float> data, Spacing spacing)
    : dims_(dims), spacing_(spacing), channels_(channels), data_(std::move(data)) {
    check_dims(dims);
    check_spacing(spacing);
    if (channels < 1) throw ParamError("a volume needs at least one channel");
    if (data_.size() != static_cast<std::size_t>(channels) * dims.voxels()) {
        throw ParamError("volume data length does not match dims x channels");
    }
    for (float v : data_) {
        if (!std::isfinite(v)) throw DataError("volume samples must be finite");
    }
}

std::span<const float> Volume::channel(int c) const {
    if (c < 0 || c >= channels_) throw ParamError("channel index " + std::to_string(c) + " out of range");
    return std::span<const float>(data_).subspan(static_cast<std::size_t>(c) * voxels(), voxels());
}

std::span<float> Volume::channel(int c) {
    if (c < 0 || c >= channels_) throw ParamError("channel index " + std::to_string(c) + " out of range");
    return std::span<float>(data_).subspan(static_cast<std::size_t>(c) * voxels(), voxels());
}

Volume Volume::select_channels(std::span<const int> channels) const {
    if (channels.empty()) throw ParamError("channel selection is empty");
    Volume out(dims_, static_cast<int>(channels.size()), spacing_);
    for (std::size_t k = 0; k < channels.size(); ++k) {
        auto src = channel(channels[k]);
        std::copy(src.begin(), src.end(), out.channel(static_cast<int>(k)).begin());
    }
    return out;
}

LabelMap::LabelMap(Dims dims, Spacing spacing, std::uint32_t fill) : dims_(dims), spacing_(spacing) {
    check_dims(dims);
    check_spacing(spacing);
    labels_.assign(dims.voxels(), fill);
}

LabelMap::LabelMap(Dims dims, std::vector<std::uint32_t> labels, Spacing spacing)
    : dims_(dims), spacing_(spacing), labels_(std::move(labels)) {
    check_dims(dims);
    check_spacing(spacing);
    if (labels_.size() != dims.voxels()) throw ParamError("label data length does not match dims");
}

void LabelMap::set_spacing(Spacing s) {
    check_spacing(s);
    spacing_ = s;
}

std::uint32_t LabelMap::label_count() const noexcept {
    if (labels_.empty()) return 0;
    return *std::max_element(labels_.begin(), labels_.end()) + 1;
}

std::size_t LabelMap::foreground() const noexcept {
    return static_cast<std::size_t>(std::count_if(labels_.begin(), labels_.end(), [](std::uint32_t l) { return l != 0; }));
}

std::uint32_t compact_labels(LabelMap& map) {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (auto& l : map.labels()) {
        auto [it, inserted] = remap.try_emplace(l, static_cast<std::uint32_t>(remap.size()));
        l = it->second;
    }
    return static_cast<std::uint32_t>(remap.size());
}

}  // namespace svx
