#include "ecgscan/paper_render.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "ecgscan/errors.hpp"

namespace ecgscan {

namespace {

constexpr double kMaxRotationDeg = 5.0;
constexpr double kPi = 3.14159265358979323846;

class Canvas {
 public:
  Canvas(int width, int height)
      : width_(width),
        height_(height),
        trace_(InkMask::empty_like(width, height)),
        grid_(InkMask::empty_like(width, height)) {}

  void grid_column(int x, int thickness) {
    for (int dx = 0; dx < thickness; ++dx) {
      const int cx = x + dx;
      if (cx < 0 || cx >= width_) continue;
      for (int y = 0; y < height_; ++y) grid_.set(cx, y);
    }
  }

  void grid_row(int y, int thickness) {
    for (int dy = 0; dy < thickness; ++dy) {
      const int cy = y + dy;
      if (cy < 0 || cy >= height_) continue;
      std::fill_n(grid_.ink.begin() + static_cast<std::ptrdiff_t>(grid_.index(0, cy)), width_, 1);
    }
  }

  // Square brush of side `thickness` centred on (x, y).
  void stamp(double x, double y, int thickness) {
    const auto x0 = static_cast<int>(std::lround(x - thickness / 2.0));
    const auto y0 = static_cast<int>(std::lround(y - thickness / 2.0));
    for (int dy = 0; dy < thickness; ++dy) {
      for (int dx = 0; dx < thickness; ++dx) {
        if (trace_.contains(x0 + dx, y0 + dy)) trace_.set(x0 + dx, y0 + dy);
      }
    }
  }

  void line(double x0, double y0, double x1, double y1, int thickness) {
    const double span = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    const int steps = std::max(1, static_cast<int>(std::ceil(span * 4.0)));
    for (int i = 0; i <= steps; ++i) {
      const double f = static_cast<double>(i) / steps;
      stamp(x0 + f * (x1 - x0), y0 + f * (y1 - y0), thickness);
    }
  }

  void block(int x, int y, int size) {
    for (int dy = 0; dy < size; ++dy) {
      for (int dx = 0; dx < size; ++dx) {
        if (trace_.contains(x + dx, y + dy)) trace_.set(x + dx, y + dy);
      }
    }
  }

  InkMask& trace() { return trace_; }
  InkMask& grid() { return grid_; }

 private:
  int width_;
  int height_;
  InkMask trace_;
  InkMask grid_;
};

void draw_grid(Canvas& canvas, const PaperLayout& layout) {
  const double ppmm = layout.px_per_mm();
  const int ratio = static_cast<int>(std::lround(layout.large_grid_mm / layout.small_grid_mm));
  const int major_px = std::max(1, static_cast<int>(std::lround(0.2 * ppmm)));
  const auto is_major = [ratio](long k) { return ((k % ratio) + ratio) % ratio == 0; };

  const long k_first = static_cast<long>(std::ceil(-layout.margin_mm / layout.small_grid_mm));
  const long kx_last = static_cast<long>(
      std::floor((layout.page_width_mm() - layout.margin_mm) / layout.small_grid_mm));
  for (long k = k_first; k <= kx_last; ++k) {
    const double x = (layout.margin_mm + k * layout.small_grid_mm) * ppmm;
    canvas.grid_column(static_cast<int>(std::floor(x)), is_major(k) ? major_px : 1);
  }
  const long ky_last = static_cast<long>(
      std::floor((layout.page_height_mm() - layout.margin_mm) / layout.small_grid_mm));
  for (long k = k_first; k <= ky_last; ++k) {
    const double y = (layout.margin_mm + k * layout.small_grid_mm) * ppmm;
    canvas.grid_row(static_cast<int>(std::floor(y)), is_major(k) ? major_px : 1);
  }
}

void draw_label(Canvas& canvas, const std::string& text, double x_px, double y_px, double ppmm) {
  const int cell = std::max(1, static_cast<int>(std::lround(0.4 * ppmm)));
  int pen_x = static_cast<int>(std::lround(x_px));
  const int top = static_cast<int>(std::lround(y_px));
  for (char c : text) {
    const std::uint8_t* rows = detail::glyph(c);
    if (rows) {
      for (int r = 0; r < 7; ++r) {
        for (int b = 0; b < 5; ++b) {
          if (rows[r] & (0x10 >> b)) canvas.block(pen_x + b * cell, top + r * cell, cell);
        }
      }
    }
    pen_x += 6 * cell;
  }
}

void draw_panel_trace(Canvas& canvas, const std::vector<double>& lead, double fs,
                      const PanelPlacement& panel, const PaperLayout& layout, int thickness) {
  const double ppmm = layout.px_per_mm();
  const double px_per_s = layout.mm_per_s * ppmm;
  const double px_per_mv = layout.mm_per_mV * ppmm;
  const double x_origin = panel.box.x0 * ppmm;
  const double baseline = panel.baseline_mm * ppmm;

  const auto first = static_cast<std::size_t>(std::lround(panel.t_begin_s * fs));
  const auto last = std::min(lead.size(), static_cast<std::size_t>(std::lround(panel.t_end_s * fs)));
  if (first >= last) return;

  const auto point = [&](std::size_t i) {
    const double t = static_cast<double>(i) / fs - panel.t_begin_s;
    return std::pair{x_origin + t * px_per_s, baseline - lead[i] * px_per_mv};
  };
  auto [px, py] = point(first);
  canvas.stamp(px, py, thickness);
  for (std::size_t i = first + 1; i < last; ++i) {
    auto [qx, qy] = point(i);
    canvas.line(px, py, qx, qy, thickness);
    px = qx;
    py = qy;
  }
}

void draw_calibration_pulse(Canvas& canvas, const PaperLayout& layout, int row, int thickness) {
  const double ppmm = layout.px_per_mm();
  const double width_mm = 0.2 * layout.mm_per_s;
  const double x0 = (layout.margin_mm - 2.0 - width_mm) * ppmm;
  const double x1 = x0 + width_mm * ppmm;
  const double base = layout.baseline_mm(row) * ppmm;
  const double top = base - layout.mm_per_mV * ppmm;
  canvas.line(x0, base, x0, top, thickness);
  canvas.line(x0, top, x1, top, thickness);
  canvas.line(x1, top, x1, base, thickness);
}

void add_noise(RasterImage& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : img.pixels) {
    const double v = std::round(p + noise(rng));
    p = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
}

// Rotates counter-clockwise (as displayed) about the image centre, bilinear
// sampling, white outside the source.
RasterImage rotate(const RasterImage& src, double degrees) {
  RasterImage out = RasterImage::filled(src.width, src.height, 255);
  out.dpi = src.dpi;
  const double theta = degrees * kPi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cx = src.width / 2.0;
  const double cy = src.height / 2.0;
  const auto sample = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= src.width || y >= src.height) return 255.0;
    return src.at(x, y);
  };
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      // Inverse map: with y pointing down, a visual CCW turn is a clockwise one in
      // array coordinates, so sample the source at +theta.
      const double sx = c * dx - s * dy + cx - 0.5;
      const double sy = s * dx + c * dy + cy - 0.5;
      const int ix = static_cast<int>(std::floor(sx));
      const int iy = static_cast<int>(std::floor(sy));
      const double fx = sx - ix;
      const double fy = sy - iy;
      const double v = (1 - fx) * (1 - fy) * sample(ix, iy) + fx * (1 - fy) * sample(ix + 1, iy) +
                       (1 - fx) * fy * sample(ix, iy + 1) + fx * fy * sample(ix + 1, iy + 1);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
  }
  return out;
}

}  // namespace

void DegradationSpec::validate() const {
  if (!(gaussian_noise_sigma >= 0.0)) throw ValidationError("noise sigma must be >= 0");
  if (!(std::abs(rotation_deg) <= kMaxRotationDeg)) {
    throw ValidationError("rotation must be within +/-5 degrees");
  }
  if (trace_thickness_px < 1) throw ValidationError("trace thickness must be >= 1 px");
  if (grid_intensity < 0 || grid_intensity > 255 || trace_intensity < 0 || trace_intensity > 255) {
    throw ValidationError("intensities must lie in [0, 255]");
  }
  if (grid_intensity <= trace_intensity) {
    throw ValidationError("grid must be lighter than trace ink");
  }
}

RenderOutput render_with_truth(const SignalSet& signals, const PaperLayout& layout,
                               const DegradationSpec& degrade) {
  layout.validate();
  degrade.validate();
  signals.validate();

  auto panels = plan_panels(layout);
  for (const auto& panel : panels) {
    if (!signals.find_lead(panel.lead)) {
      throw ValidationError("signal set is missing lead '" + panel.lead + "'");
    }
  }
  if (signals.duration_s() + 1e-9 < layout.rhythm_s) {
    throw ValidationError("signal is shorter than the " + std::to_string(layout.rhythm_s) +
                          " s page");
  }
  if (layout.draw_calibration_pulse && layout.margin_mm < 0.2 * layout.mm_per_s + 2.0) {
    throw ValidationError("margin too narrow for the calibration pulse");
  }

  const int width = layout.page_width_px();
  const int height = layout.page_height_px();
  const double ppmm = layout.px_per_mm();
  Canvas canvas(width, height);

  if (degrade.draw_grid) draw_grid(canvas, layout);
  if (degrade.draw_traces) {
    for (const auto& panel : panels) {
      draw_panel_trace(canvas, signals.lead(panel.lead), signals.sampling_hz, panel, layout,
                       degrade.trace_thickness_px);
    }
    if (layout.draw_calibration_pulse) {
      for (int row = 0; row <= layout.rows; ++row) {
        draw_calibration_pulse(canvas, layout, row, degrade.trace_thickness_px);
      }
    }
    if (layout.draw_labels) {
      for (const auto& panel : panels) {
        draw_label(canvas, panel.lead, (panel.box.x0 + 1.0) * ppmm, (panel.box.y0 + 2.0) * ppmm,
                   ppmm);
      }
    }
  }

  RenderOutput out;
  out.image = RasterImage::filled(width, height, 255);
  out.image.dpi = layout.dpi;
  auto& trace = canvas.trace();
  auto& grid = canvas.grid();
  for (std::size_t i = 0; i < trace.ink.size(); ++i) {
    if (trace.ink[i]) {
      out.image.pixels[i] = static_cast<std::uint8_t>(degrade.trace_intensity);
      grid.ink[i] = 0;
    } else if (grid.ink[i]) {
      out.image.pixels[i] = static_cast<std::uint8_t>(degrade.grid_intensity);
    }
  }

  if (degrade.gaussian_noise_sigma > 0.0) {
    add_noise(out.image, degrade.gaussian_noise_sigma, degrade.seed);
  }
  if (degrade.rotation_deg != 0.0) out.image = rotate(out.image, degrade.rotation_deg);

  out.truth.trace_pixels = trace.count();
  out.truth.grid_pixels = grid.count();
  out.truth.trace = std::move(trace);
  out.truth.grid = std::move(grid);
  for (int row = 0; row <= layout.rows; ++row) {
    out.truth.row_baselines_px.push_back(layout.baseline_mm(row) * ppmm);
  }
  out.truth.panels = std::move(panels);
  return out;
}

void to_json(nlohmann::json& j, const DegradationSpec& d) {
  j = nlohmann::json{{"gaussian_noise_sigma", d.gaussian_noise_sigma},
                     {"rotation_deg", d.rotation_deg},
                     {"trace_thickness_px", d.trace_thickness_px},
                     {"grid_intensity", d.grid_intensity},
                     {"trace_intensity", d.trace_intensity},
                     {"draw_grid", d.draw_grid},
                     {"draw_traces", d.draw_traces},
                     {"seed", d.seed}};
}

void from_json(const nlohmann::json& j, DegradationSpec& d) {
  DegradationSpec def;
  d.gaussian_noise_sigma = j.value("gaussian_noise_sigma", def.gaussian_noise_sigma);
  d.rotation_deg = j.value("rotation_deg", def.rotation_deg);
  d.trace_thickness_px = j.value("trace_thickness_px", def.trace_thickness_px);
  d.grid_intensity = j.value("grid_intensity", def.grid_intensity);
  d.trace_intensity = j.value("trace_intensity", def.trace_intensity);
  d.draw_grid = j.value("draw_grid", def.draw_grid);
  d.draw_traces = j.value("draw_traces", def.draw_traces);
  d.seed = j.value("seed", def.seed);
}

nlohmann::json render_manifest(const PaperLayout& layout, const DegradationSpec& degrade,
                               const RenderTruth& truth, int width, int height) {
  return nlohmann::json{{"version", "ecgscan-render-1"},
                        {"layout", layout},
                        {"degradation", degrade},
                        {"seed", degrade.seed},
                        {"width_px", width},
                        {"height_px", height},
                        {"row_baselines_px", truth.row_baselines_px},
                        {"trace_pixels", truth.trace_pixels},
                        {"grid_pixels", truth.grid_pixels}};
}

}  // namespace ecgscan
