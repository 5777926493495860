#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ecgscan/paper_layout.hpp"
#include "ecgscan/raster.hpp"
#include "ecgscan/signal_set.hpp"

namespace ecgscan {

/// Drawing style and scan degradations applied to a render.
struct DegradationSpec {
  double gaussian_noise_sigma = 0.0;  ///< intensity units
  double rotation_deg = 0.0;          ///< |rotation| <= 5, about the image centre
  int trace_thickness_px = 2;
  int grid_intensity = 200;
  int trace_intensity = 0;
  bool draw_grid = true;
  bool draw_traces = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Pixel-level ground truth captured before degradations are applied.
struct RenderTruth {
  InkMask trace;  ///< every pixel painted by a waveform polyline
  InkMask grid;   ///< grid pixels not overpainted by a trace
  std::size_t trace_pixels = 0;
  std::size_t grid_pixels = 0;
  std::vector<PanelPlacement> panels;
  /// Baseline ordinate of each strip (segment rows then the rhythm strip), px.
  std::vector<double> row_baselines_px;
};

struct RenderOutput {
  RasterImage image;
  RenderTruth truth;
};

RenderOutput render_with_truth(const SignalSet& signals, const PaperLayout& layout,
                               const DegradationSpec& degrade = {});

inline RasterImage render(const SignalSet& signals, const PaperLayout& layout,
                          const DegradationSpec& degrade = {}) {
  return render_with_truth(signals, layout, degrade).image;
}

/// Sidecar manifest written next to rendered PNGs.
nlohmann::json render_manifest(const PaperLayout& layout, const DegradationSpec& degrade,
                               const RenderTruth& truth, int width, int height);

void to_json(nlohmann::json& j, const DegradationSpec& spec);
void from_json(const nlohmann::json& j, DegradationSpec& spec);

namespace detail {
/// 5x7 bitmap glyph rows (bit 4 = leftmost column); nullptr if unsupported.
const std::uint8_t* glyph(char c);
}  // namespace detail

}  // namespace ecgscan
