#pragma once

#include <filesystem>

#include "veridoc/image.hpp"

namespace veridoc {

/// Any PNG is accepted; palette, alpha and 16-bit inputs are converted to 8-bit RGB.
RasterImage read_png_rgb(const std::filesystem::path& path);
GrayImage read_png_gray(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& img);
void write_png(const std::filesystem::path& path, const GrayImage& img);
inline void write_png(const std::filesystem::path& path, const BinaryImage& img) { write_png(path, img.gray()); }

}  // namespace veridoc
