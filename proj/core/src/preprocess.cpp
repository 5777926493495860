#include "ecgscan/preprocess.hpp"

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

// Counts are 64-bit, so n < 2^72 and sums < 2^80 over 256 bins; the cross
// products below stay under 2^448.
using Wide = boost::multiprecision::uint512_t;

}  // namespace

RasterImage to_grayscale(const RgbImage& rgb) {
  RasterImage out;
  out.width = rgb.width;
  out.height = rgb.height;
  out.dpi = rgb.dpi;
  out.pixels.resize(static_cast<std::size_t>(rgb.width) * static_cast<std::size_t>(rgb.height));
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    // Fixed-point weights (x1000) keep the rounding exact.
    const long luma = 299L * rgb.data[3 * i] + 587L * rgb.data[3 * i + 1] + 114L * rgb.data[3 * i + 2];
    out.pixels[i] = static_cast<std::uint8_t>(std::min(255L, (luma + 500) / 1000));
  }
  return out;
}

Histogram histogram(const RasterImage& gray) {
  Histogram hist{};
  for (auto p : gray.pixels) ++hist[p];
  return hist;
}

int otsu_threshold(const Histogram& hist) {
  int populated = 0;
  Wide total = 0;
  Wide total_sum = 0;
  for (int i = 0; i < 256; ++i) {
    if (hist[i] > 0) ++populated;
    total += hist[i];
    total_sum += Wide(hist[i]) * i;
  }
  if (populated < 2) throw DegenerateHistogramError("histogram has fewer than two intensities");

  // N^2 w0 w1 (mu0 - mu1)^2 = (S0 n1 - S1 n0)^2 / (n0 n1); the N^2 factor is
  // common to every split and drops out of the comparison.
  int best_t = -1;
  Wide best_num = 0;
  Wide best_den = 1;
  Wide n0 = 0;
  Wide s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += Wide(hist[t]) * t;
    const Wide n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const Wide s1 = total_sum - s0;
    const Wide lhs = s0 * n1;
    const Wide rhs = s1 * n0;
    const Wide diff = lhs > rhs ? Wide(lhs - rhs) : Wide(rhs - lhs);
    const Wide num = diff * diff;
    const Wide den = n0 * n1;
    if (best_t < 0 || num * best_den > best_num * den) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

InkMask binarize(const RasterImage& gray, double threshold) {
  InkMask mask = InkMask::empty_like(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    mask.ink[i] = static_cast<double>(gray.pixels[i]) < threshold ? 1 : 0;
  }
  return mask;
}

GridRemovalResult remove_grid(const RasterImage& gray, const GridRemovalConfig& config) {
  if (config.max_iters < 1) throw ContractViolation("max_iters must be >= 1");
  const int t0 = otsu_threshold(histogram(gray));
  const double t_floor = config.floor_fraction * t0;

  GridRemovalResult result;
  result.initial_threshold = t0;
  double t = t0;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    InkMask mask = binarize(gray, inclusive_cutoff(t));
    if (config.on_iteration) config.on_iteration(iter, t, mask);
    GridEstimate grid = detect_grid(mask, config.detect);
    const bool visible = grid.confidence >= config.grid_visible_threshold;

    result.mask = std::move(mask);
    result.grid = std::move(grid);
    result.iterations = iter;
    result.final_threshold = t;
    if (!visible) {
      result.grid_residual = false;
      return result;
    }
    const double next = t * config.decay;
    if (iter == config.max_iters || next < t_floor) break;
    t = next;
  }
  result.grid_residual = true;
  return result;
}

}  // namespace ecgscan
