#include "ecgscan/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

constexpr double kMetresPerInch = 0.0254;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open '" + path.string() + "'");
  return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void write_impl(const std::filesystem::path& path, int width, int height, int color_type,
                int channels, const std::uint8_t* data, std::optional<double> dpi,
                int compression) {
  if (width <= 0 || height <= 0) throw ValidationError("cannot write an empty image");
  FilePtr file = open_file(path, "wb");
  std::string what;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
  if (!png) throw Error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("png_create_info_struct failed");
  }

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
        data + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) * channels);
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("writing '" + path.string() + "': " + what);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, compression);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (dpi && *dpi > 0.0) {
    const auto ppm = static_cast<png_uint_32>(std::lround(*dpi / kMetresPerInch));
    png_set_pHYs(png, info, ppm, ppm, PNG_RESOLUTION_METER);
  }
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

DecodedImage read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw UnsupportedFormatError("'" + path.string() + "' is not a PNG file");
  }

  std::string what;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
  if (!png) throw Error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("png_create_info_struct failed");
  }

  // Everything with automatic storage that must survive longjmp is declared here.
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::optional<double> dpi;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("decoding '" + path.string() + "': " + what);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const auto color_type = png_get_color_type(png, info);
  const auto bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_color_16 white{};
    white.red = white.green = white.blue = white.gray = 255;
    png_set_background(png, &white, PNG_BACKGROUND_GAMMA_SCREEN, 0, 1.0);
  }

  png_uint_32 res_x = 0, res_y = 0;
  int unit = 0;
  if (png_get_pHYs(png, info, &res_x, &res_y, &unit) && unit == PNG_RESOLUTION_METER && res_x > 0) {
    dpi = static_cast<double>(res_x) * kMetresPerInch;
    // pHYs stores whole pixels per metre; recover integral DPI values exactly.
    const double whole = std::round(*dpi);
    if (std::lround(whole / kMetresPerInch) == static_cast<long>(res_x)) dpi = whole;
  }

  png_read_update_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  buffer.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * channels);
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        buffer.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels == 1) {
    RasterImage img;
    img.width = width;
    img.height = height;
    img.pixels = std::move(buffer);
    img.dpi = dpi;
    return img;
  }
  if (channels != 3) {
    throw UnsupportedFormatError("'" + path.string() + "' has " + std::to_string(channels) +
                                 " channels after conversion");
  }
  RgbImage img;
  img.width = width;
  img.height = height;
  img.data = std::move(buffer);
  img.dpi = dpi;
  return img;
}

void write_png(const std::filesystem::path& path, const RasterImage& image, int compression) {
  write_impl(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, 1, image.pixels.data(),
             image.dpi, compression);
}

void write_png(const std::filesystem::path& path, const RgbImage& image, int compression) {
  write_impl(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 3, image.data.data(), image.dpi,
             compression);
}

}  // namespace ecgscan
