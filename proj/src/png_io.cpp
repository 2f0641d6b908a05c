#include "veridoc/png_io.hpp"

#include <cstring>
#include <vector>

#include <png.h>

#include "veridoc/imgproc.hpp"

namespace veridoc {

namespace {

// Decodes into `format` (PNG_FORMAT_RGB or PNG_FORMAT_GRAY); returns width.
int decode(const std::filesystem::path& path, png_uint_32 format, std::vector<std::uint8_t>& buf, int& height) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("cannot read PNG " + path.string() + ": " + image.message);
    image.format = format;
    buf.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    height = static_cast<int>(image.height);
    return static_cast<int>(image.width);
}

void encode(const std::filesystem::path& path, png_uint_32 format, int width, int height, const std::uint8_t* data) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr))
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

}  // namespace

RasterImage read_png_rgb(const std::filesystem::path& path) {
    std::vector<std::uint8_t> buf;
    int h = 0;
    const int w = decode(path, PNG_FORMAT_RGB, buf, h);
    Plane<std::uint8_t> data = Eigen::Map<const Plane<std::uint8_t>>(buf.data(), h, 3 * w);
    return RasterImage(w, std::move(data));
}

GrayImage read_png_gray(const std::filesystem::path& path) {
    // Decode as RGB and apply our own luma so gray inputs stay exact and colour
    // inputs follow the library-wide BT.601 rule.
    return to_grayscale(read_png_rgb(path));
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
    encode(path, PNG_FORMAT_RGB, img.width(), img.height(), img.plane().data());
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    encode(path, PNG_FORMAT_GRAY, img.width(), img.height(), img.plane().data());
}

}  // namespace veridoc
