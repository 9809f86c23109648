#pragma once

#include <filesystem>
#include <variant>

#include "svx/volume.hpp"

namespace svx {

/// Reader/writer for a subset of the MetaImage (.mhd + .raw) format.
///
/// Header keys understood:
///   NDims = 3
///   DimSize = nx ny nz
///   ElementSpacing = sx sy sz        (optional, default 1 1 1)
///   Channels = C                     (extension, optional, default 1)
///   ElementType = MET_FLOAT | MET_UCHAR | MET_UINT
///   ElementByteOrderMSB = False      (optional)
///   ElementDataFile = <path relative to the header>
///
/// ObjectType, BinaryData, BinaryDataByteOrderMSB, CompressedData (False),
/// Offset, TransformMatrix, CenterOfRotation and AnatomicalOrientation are
/// accepted so files written by other MetaImage tools load; any other key is
/// a FormatError. The payload is channel-major, x-fastest, little-endian.
using Image = std::variant<Volume, LabelMap>;

/// Float payloads become a Volume, unsigned integer payloads a LabelMap.
Image read_image(const std::filesystem::path& header);

/// Reads a float image; FormatError if the file holds labels.
Volume read_volume(const std::filesystem::path& header);
/// Reads an unsigned integer image; FormatError if the file holds floats.
LabelMap read_labels(const std::filesystem::path& header);

/// Volumes are written as MET_FLOAT, label maps as MET_UINT. The raw file is
/// placed next to the header with the header's stem and a `.raw` extension.
void write_image(const Volume& v, const std::filesystem::path& header);
void write_image(const LabelMap& m, const std::filesystem::path& header);

}  // namespace svx
