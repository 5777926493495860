#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ecgscan/preprocess.hpp"

namespace ecgscan {

namespace {

std::vector<int> line_candidates(const std::vector<std::uint32_t>& counts, double min_count) {
  std::vector<int> lines;
  const int n = static_cast<int>(counts.size());
  int i = 0;
  while (i < n) {
    if (counts[static_cast<std::size_t>(i)] < min_count) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && counts[static_cast<std::size_t>(j + 1)] >= min_count) ++j;
    lines.push_back((i + j) / 2);
    i = j + 1;
  }
  return lines;
}

// First prominent peak of the normalised autocorrelation of a density
// profile, refined to sub-pixel by a parabola through its neighbours.
std::optional<double> dominant_lag(const std::vector<std::uint32_t>& counts,
                                   const GridDetectConfig& cfg) {
  const int n = static_cast<int>(counts.size());
  const int max_lag = std::min(cfg.max_period_px, n / 2);
  if (max_lag <= cfg.min_period_px) return std::nullopt;

  const double mean =
      std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(n);
  std::vector<double> d(counts.size());
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)] - mean;

  std::vector<double> ac(static_cast<std::size_t>(max_lag) + 2, 0.0);
  for (int lag = 1; lag <= max_lag + 1 && lag < n; ++lag) {
    double acc = 0.0;
    for (int i = 0; i + lag < n; ++i) {
      acc += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i + lag)];
    }
    ac[static_cast<std::size_t>(lag)] = acc / (n - lag);
  }

  double best = 0.0;
  for (int lag = cfg.min_period_px; lag <= max_lag; ++lag) best = std::max(best, ac[static_cast<std::size_t>(lag)]);
  if (!(best > 0.0)) return std::nullopt;

  for (int lag = cfg.min_period_px; lag <= max_lag; ++lag) {
    const double here = ac[static_cast<std::size_t>(lag)];
    const double prev = ac[static_cast<std::size_t>(lag - 1)];
    const double next = ac[static_cast<std::size_t>(lag + 1)];
    if (here < 0.5 * best || here < prev || here < next) continue;
    const double denom = prev - 2.0 * here + next;
    double offset = 0.0;
    if (denom < 0.0) offset = std::clamp(0.5 * (prev - next) / denom, -0.5, 0.5);
    return lag + offset;
  }
  return std::nullopt;
}

// Sharpens an integer-ish lag using the spread of the candidate lines: with
// rounding jitter on individual spacings, span / count is far more accurate.
double refine_period(double period, const std::vector<int>& lines, double tolerance) {
  if (lines.size() < 3) return period;
  const double span = lines.back() - lines.front();
  const double n = std::round(span / period);
  if (n < 2.0) return period;
  const double refined = span / n;
  std::size_t on_lattice = 0;
  for (int x : lines) {
    const double k = std::round((x - lines.front()) / refined);
    if (std::abs(x - lines.front() - k * refined) <= tolerance) ++on_lattice;
  }
  return 2 * on_lattice >= lines.size() ? refined : period;
}

std::size_t consistent_lines(const std::vector<int>& lines, double period, double tolerance) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int nearest = -1;
    if (i > 0) nearest = lines[i] - lines[i - 1];
    if (i + 1 < lines.size()) {
      const int right = lines[i + 1] - lines[i];
      if (nearest < 0 || right < nearest) nearest = right;
    }
    if (nearest <= 0) continue;
    const double k = std::round(nearest / period);
    if (k >= 1.0 && k <= 5.0 && std::abs(nearest - k * period) <= tolerance) ++ok;
  }
  return ok;
}

}  // namespace

GridEstimate detect_grid(const InkMask& mask, const GridDetectConfig& config) {
  GridEstimate out;
  if (mask.width <= 0 || mask.height <= 0) return out;

  std::vector<std::uint32_t> col_counts(static_cast<std::size_t>(mask.width), 0);
  std::vector<std::uint32_t> row_counts(static_cast<std::size_t>(mask.height), 0);
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.ink.data() + mask.index(0, y);
    std::uint32_t in_row = 0;
    for (int x = 0; x < mask.width; ++x) {
      col_counts[static_cast<std::size_t>(x)] += row[x];
      in_row += row[x];
    }
    row_counts[static_cast<std::size_t>(y)] = in_row;
  }

  out.vertical_line_columns = line_candidates(col_counts, config.grid_line_fraction * mask.height);
  out.horizontal_line_rows = line_candidates(row_counts, config.grid_line_fraction * mask.width);

  auto period = dominant_lag(col_counts, config);
  if (period) {
    period = refine_period(*period, out.vertical_line_columns, config.consistency_tolerance_px);
  } else if ((period = dominant_lag(row_counts, config))) {
    period = refine_period(*period, out.horizontal_line_rows, config.consistency_tolerance_px);
  }
  if (period && *period > 2.0) out.period_px = period;

  const std::size_t total = out.vertical_line_columns.size() + out.horizontal_line_rows.size();
  if (out.period_px && total > 0 && total >= static_cast<std::size_t>(std::max(1, config.min_line_count))) {
    const std::size_t ok =
        consistent_lines(out.vertical_line_columns, *out.period_px, config.consistency_tolerance_px) +
        consistent_lines(out.horizontal_line_rows, *out.period_px, config.consistency_tolerance_px);
    out.confidence = static_cast<double>(ok) / static_cast<double>(total);
  }
  return out;
}

void to_json(nlohmann::json& j, const GridEstimate& g) {
  j = nlohmann::json{{"period_px", g.period_px ? nlohmann::json(*g.period_px) : nlohmann::json()},
                     {"vertical_lines", g.vertical_line_columns.size()},
                     {"horizontal_lines", g.horizontal_line_rows.size()},
                     {"confidence", g.confidence}};
}

}  // namespace ecgscan
