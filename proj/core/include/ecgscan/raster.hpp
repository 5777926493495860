#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ecgscan {

/// 8-bit grayscale raster, row-major with row 0 at the top. 0 is black.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::optional<double> dpi;

  static RasterImage filled(int width, int height, std::uint8_t value);

  std::uint8_t at(int x, int y) const { return pixels[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels[index(x, y)]; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool empty() const { return width <= 0 || height <= 0; }
};

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  ///< 3 bytes per pixel
  std::optional<double> dpi;

  static RgbImage filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  static RgbImage from_gray(const RasterImage& gray);

  std::uint8_t* px(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                              static_cast<std::size_t>(x));
  }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                              static_cast<std::size_t>(x));
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    auto* p = px(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
};

/// Boolean foreground mask; true (1) marks ink.
struct InkMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> ink;

  static InkMask empty_like(int width, int height);

  bool at(int x, int y) const { return ink[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { ink[index(x, y)] = value ? 1 : 0; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t count() const;
};

/// Renders a mask as black ink on white, for debug output.
RasterImage mask_to_image(const InkMask& mask);

}  // namespace ecgscan
