#pragma once

#include <filesystem>
#include <variant>

#include "ecgscan/raster.hpp"

namespace ecgscan {

/// Grayscale PNGs decode to RasterImage, everything else to RgbImage.
/// Alpha is composited onto white; 16-bit channels are reduced to 8 bits.
/// DPI comes from the pHYs chunk when it is given in metres.
using DecodedImage = std::variant<RasterImage, RgbImage>;

DecodedImage read_png(const std::filesystem::path& path);

/// Writes an 8-bit PNG; a set dpi is stored in pHYs as pixels per metre.
void write_png(const std::filesystem::path& path, const RasterImage& image, int compression = 6);
void write_png(const std::filesystem::path& path, const RgbImage& image, int compression = 6);

}  // namespace ecgscan
