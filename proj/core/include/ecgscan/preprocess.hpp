#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ecgscan/raster.hpp"

namespace ecgscan {

using Histogram = std::array<std::uint64_t, 256>;

/// luma = round(0.299 R + 0.587 G + 0.114 B)
RasterImage to_grayscale(const RgbImage& rgb);

Histogram histogram(const RasterImage& gray);

/// Otsu's threshold over the split "<= t | > t". Maximises the
/// between-class variance w0 w1 (mu0 - mu1)^2 exactly (integer arithmetic);
/// ties go to the smallest t. Throws DegenerateHistogramError when fewer than
/// two bins are populated.
int otsu_threshold(const Histogram& hist);

/// ink = intensity < threshold.
InkMask binarize(const RasterImage& gray, double threshold);

struct GridEstimate {
  std::optional<double> period_px;  ///< > 2 when present
  std::vector<int> vertical_line_columns;
  std::vector<int> horizontal_line_rows;
  double confidence = 0.0;  ///< fraction of line candidates consistent with the period
};

struct GridDetectConfig {
  /// A column (row) is a line candidate when at least this fraction of its
  /// pixels is ink.
  double grid_line_fraction = 0.5;
  int min_period_px = 3;
  int max_period_px = 400;
  /// Candidates whose neighbour spacing is within this many px of a multiple
  /// of the period count as consistent.
  double consistency_tolerance_px = 1.0;
  /// Fewer line candidates than this give confidence 0. A page of traces
  /// has at most one flat baseline per row, a printed grid has dozens.
  int min_line_count = 6;
};

GridEstimate detect_grid(const InkMask& mask, const GridDetectConfig& config = {});

struct GridRemovalConfig {
  double grid_visible_threshold = 0.35;
  double decay = 0.95;
  double floor_fraction = 0.3;  ///< t_floor = floor_fraction * t0
  int max_iters = 20;
  GridDetectConfig detect;
  /// Called with (iteration, threshold, mask) after each binarization.
  std::function<void(int, double, const InkMask&)> on_iteration;
};

struct GridRemovalResult {
  InkMask mask;
  int iterations = 0;
  double initial_threshold = 0;
  double final_threshold = 0;
  bool grid_residual = false;
  GridEstimate grid;  ///< estimate on the returned mask
};

/// Otsu binarization followed by repeated 5% threshold reductions until
/// detect_grid no longer sees a grid. The threshold t keeps Otsu's meaning
/// (dark class is intensity <= t), so each pass binarizes with cutoff
/// floor(t) + 1.
GridRemovalResult remove_grid(const RasterImage& gray, const GridRemovalConfig& config = {});

/// Binarization cutoff matching an inclusive dark-class threshold t.
inline double inclusive_cutoff(double t) { return static_cast<double>(static_cast<long>(t)) + 1.0; }

void to_json(nlohmann::json& j, const GridEstimate& g);

}  // namespace ecgscan
