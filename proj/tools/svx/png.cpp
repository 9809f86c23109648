#include <png.h>

#include "cli.hpp"
#include "svx/errors.hpp"

namespace svx::cli {

void Canvas::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
}

void Canvas::write_png(const std::filesystem::path& path) const {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(w_);
    img.height = static_cast<png_uint_32>(h_);
    img.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, px_.data(), 0, nullptr)) {
        const std::string why = img.message;
        png_image_free(&img);
        throw IoError("cannot write " + path.string() + ": " + why);
    }
}

}  // namespace svx::cli
