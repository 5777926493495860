#include "ecgscan/raster.hpp"

#include <algorithm>

namespace ecgscan {

RasterImage RasterImage::filled(int width, int height, std::uint8_t value) {
  RasterImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value);
  return img;
}

RgbImage RgbImage::filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img;
  img.width = width;
  img.height = height;
  img.data.resize(3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < img.data.size(); i += 3) {
    img.data[i] = r;
    img.data[i + 1] = g;
    img.data[i + 2] = b;
  }
  return img;
}

RgbImage RgbImage::from_gray(const RasterImage& gray) {
  RgbImage img;
  img.width = gray.width;
  img.height = gray.height;
  img.dpi = gray.dpi;
  img.data.resize(3 * gray.pixels.size());
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    img.data[3 * i] = img.data[3 * i + 1] = img.data[3 * i + 2] = gray.pixels[i];
  }
  return img;
}

InkMask InkMask::empty_like(int width, int height) {
  InkMask mask;
  mask.width = width;
  mask.height = height;
  mask.ink.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  return mask;
}

std::size_t InkMask::count() const {
  return static_cast<std::size_t>(std::count_if(ink.begin(), ink.end(), [](auto v) { return v != 0; }));
}

RasterImage mask_to_image(const InkMask& mask) {
  RasterImage img = RasterImage::filled(mask.width, mask.height, 255);
  for (std::size_t i = 0; i < mask.ink.size(); ++i) {
    if (mask.ink[i]) img.pixels[i] = 0;
  }
  return img;
}

}  // namespace ecgscan
