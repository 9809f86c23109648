#include "svx/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svx/errors.hpp"

namespace svx {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

enum class ElementType { Float, UChar, UInt };

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

const std::set<std::string>& ignorable_keys() {
    static const std::set<std::string> keys = {"ObjectType",       "BinaryData",    "BinaryDataByteOrderMSB",
                                               "CompressedData",   "Offset",        "TransformMatrix",
                                               "CenterOfRotation", "AnatomicalOrientation"};
    return keys;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {"NDims",       "DimSize",           "ElementSpacing",
                                               "Channels",    "ElementType",       "ElementByteOrderMSB",
                                               "ElementDataFile"};
    return keys;
}

bool is_true(const std::string& v) { return v == "True" || v == "true" || v == "1"; }

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value, std::size_t expected) {
    std::istringstream in(value);
    std::vector<T> out;
    T item{};
    while (in >> item) out.push_back(item);
    if (!in.eof() || out.size() != expected) {
        throw FormatError("header key " + key + " expects " + std::to_string(expected) + " values, got '" + value + "'");
    }
    return out;
}

struct Header {
    Dims dims;
    Spacing spacing;
    int channels = 1;
    ElementType type = ElementType::Float;
    std::filesystem::path data_file;
};

Header parse_header(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open header " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed header line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key) && !ignorable_keys().count(key)) {
            throw FormatError("unknown header key '" + key + "'");
        }
        if (kv.count(key)) throw FormatError("duplicate header key '" + key + "'");
        kv[key] = value;
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(std::string("missing header key ") + key);
        return it->second;
    };

    Header h;
    if (require("NDims") != "3") throw FormatError("only NDims = 3 is supported");
    const auto dims = parse_list<long long>("DimSize", require("DimSize"), 3);
    for (auto d : dims) {
        if (d <= 0 || d > std::numeric_limits<int>::max()) throw FormatError("DimSize entries must be positive");
    }
    h.dims = {static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2])};

    if (auto it = kv.find("ElementSpacing"); it != kv.end()) {
        const auto s = parse_list<double>("ElementSpacing", it->second, 3);
        h.spacing = {s[0], s[1], s[2]};
        for (double v : s) {
            if (!std::isfinite(v) || v <= 0.0) throw FormatError("ElementSpacing entries must be positive");
        }
    }
    if (auto it = kv.find("Channels"); it != kv.end()) {
        const auto c = parse_list<int>("Channels", it->second, 1);
        if (c[0] < 1) throw FormatError("Channels must be >= 1");
        h.channels = c[0];
    }
    const std::string& type = require("ElementType");
    if (type == "MET_FLOAT") {
        h.type = ElementType::Float;
    } else if (type == "MET_UCHAR") {
        h.type = ElementType::UChar;
    } else if (type == "MET_UINT") {
        h.type = ElementType::UInt;
    } else {
        throw FormatError("unsupported ElementType '" + type + "'");
    }
    if (h.type != ElementType::Float && h.channels != 1) throw FormatError("label images must have one channel");

    for (const char* key : {"ElementByteOrderMSB", "BinaryDataByteOrderMSB"}) {
        if (auto it = kv.find(key); it != kv.end() && is_true(it->second)) {
            throw FormatError("big-endian payloads are not supported");
        }
    }
    if (auto it = kv.find("CompressedData"); it != kv.end() && is_true(it->second)) {
        throw FormatError("compressed payloads are not supported");
    }
    if (auto it = kv.find("BinaryData"); it != kv.end() && !is_true(it->second)) {
        throw FormatError("ASCII payloads are not supported");
    }

    const std::string& data_file = require("ElementDataFile");
    if (data_file == "LOCAL" || data_file == "LIST" || data_file.empty()) {
        throw FormatError("ElementDataFile must name a separate raw file");
    }
    h.data_file = path.parent_path() / data_file;
    return h;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open data file " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected) {
        throw FormatError("data file " + path.string() + " holds " + std::to_string(bytes.size()) +
                          " bytes, header implies " + std::to_string(expected));
    }
    return bytes;
}

template <typename T>
T load_le(const unsigned char* p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto* b = reinterpret_cast<unsigned char*>(&value);
        std::reverse(b, b + sizeof(T));
    }
    return value;
}

template <typename T>
void store_le(T value, unsigned char* p) {
    std::memcpy(p, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(p, p + sizeof(T));
}

std::filesystem::path raw_path_for(const std::filesystem::path& header) {
    auto raw = header;
    raw.replace_extension(".raw");
    return raw;
}

void write_header(const std::filesystem::path& header, const Dims& d, const Spacing& s, int channels,
                  const char* type, const std::filesystem::path& raw) {
    std::ofstream out(header, std::ios::trunc);
    if (!out) throw IoError("cannot write header " + header.string());
    out << std::setprecision(17);
    out << "ObjectType = Image\n";
    out << "NDims = 3\n";
    out << "BinaryData = True\n";
    out << "DimSize = " << d.nx << ' ' << d.ny << ' ' << d.nz << '\n';
    out << "ElementSpacing = " << s.sx << ' ' << s.sy << ' ' << s.sz << '\n';
    if (channels != 1) out << "Channels = " << channels << '\n';
    out << "ElementType = " << type << '\n';
    out << "ElementByteOrderMSB = False\n";
    out << "ElementDataFile = " << raw.filename().string() << '\n';
    if (!out) throw IoError("failed writing header " + header.string());
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write data file " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing data file " + path.string());
}

}  // namespace

Image read_image(const std::filesystem::path& header) {
    const Header h = parse_header(header);
    const std::size_t n = h.dims.voxels();
    switch (h.type) {
        case ElementType::Float: {
            const std::size_t count = n * static_cast<std::size_t>(h.channels);
            const auto bytes = read_bytes(h.data_file, count * 4);
            std::vector<float> data(count);
            for (std::size_t i = 0; i < count; ++i) {
                data[i] = load_le<float>(&bytes[4 * i]);
                if (!std::isfinite(data[i])) throw DataError("non-finite sample in " + h.data_file.string());
            }
            return Volume(h.dims, h.channels, std::move(data), h.spacing);
        }
        case ElementType::UChar: {
            const auto bytes = read_bytes(h.data_file, n);
            return LabelMap(h.dims, std::vector<std::uint32_t>(bytes.begin(), bytes.end()), h.spacing);
        }
        case ElementType::UInt: {
            const auto bytes = read_bytes(h.data_file, n * 4);
            std::vector<std::uint32_t> labels(n);
            for (std::size_t i = 0; i < n; ++i) labels[i] = load_le<std::uint32_t>(&bytes[4 * i]);
            return LabelMap(h.dims, std::move(labels), h.spacing);
        }
    }
    throw InternalError("unreachable element type");
}

Volume read_volume(const std::filesystem::path& header) {
    auto img = read_image(header);
    if (auto* v = std::get_if<Volume>(&img)) return std::move(*v);
    throw FormatError(header.string() + " holds labels, expected a float volume");
}

LabelMap read_labels(const std::filesystem::path& header) {
    auto img = read_image(header);
    if (auto* m = std::get_if<LabelMap>(&img)) return std::move(*m);
    throw FormatError(header.string() + " holds floats, expected a label image");
}

void write_image(const Volume& v, const std::filesystem::path& header) {
    const auto raw = raw_path_for(header);
    const auto data = v.data();
    std::vector<unsigned char> bytes(data.size() * 4);
    for (std::size_t i = 0; i < data.size(); ++i) store_le(data[i], &bytes[4 * i]);
    write_bytes(raw, bytes);
    write_header(header, v.dims(), v.spacing(), v.channels(), "MET_FLOAT", raw);
}

void write_image(const LabelMap& m, const std::filesystem::path& header) {
    const auto raw = raw_path_for(header);
    const auto labels = m.labels();
    std::vector<unsigned char> bytes(labels.size() * 4);
    for (std::size_t i = 0; i < labels.size(); ++i) store_le(labels[i], &bytes[4 * i]);
    write_bytes(raw, bytes);
    write_header(header, m.dims(), m.spacing(), 1, "MET_UINT", raw);
}

}  // namespace svx
