#include "ecgscan/trace_extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecgscan/errors.hpp"

namespace ecgscan {

std::size_t ColumnNodes::node_count() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.size();
  return n;
}

std::size_t ColumnNodes::non_empty_columns() const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(), [](const auto& c) { return !c.empty(); }));
}

ColumnNodes find_nodes(const InkMask& mask, const RowBand& band, int col_begin, int col_end,
                       const TraceConfig& config) {
  if (config.max_run_px < 1) throw ContractViolation("max_run_px must be >= 1");
  col_begin = std::clamp(col_begin, 0, mask.width);
  col_end = std::clamp(col_end, col_begin, mask.width);
  const int top = std::clamp(band.y_top, 0, mask.height);
  const int bottom = std::clamp(band.y_bottom, top, mask.height);

  ColumnNodes out;
  out.first_col = col_begin;
  out.columns.resize(static_cast<std::size_t>(col_end - col_begin));
  const auto emit = [&](std::vector<CandidateNode>& nodes, int col, int first, int last) {
    for (int start = first; start <= last; start += config.max_run_px) {
      const int stop = std::min(last, start + config.max_run_px - 1);
      nodes.push_back({col, 0.5 * (start + stop), stop - start + 1});
    }
  };
  for (int x = col_begin; x < col_end; ++x) {
    auto& nodes = out.columns[static_cast<std::size_t>(x - col_begin)];
    int y = top;
    while (y < bottom) {
      if (!mask.at(x, y)) {
        ++y;
        continue;
      }
      const int first = y;
      while (y < bottom && mask.at(x, y)) ++y;
      emit(nodes, x, first, y - 1);
    }
  }
  return out;
}

double edge_cost(const CandidateNode& a, const CandidateNode& b, double angle_weight) {
  if (b.col <= a.col) throw ContractViolation("edge must move strictly rightwards");
  const double dx = b.col - a.col;
  const double dy = b.y_center - a.y_center;
  return std::hypot(dx, dy) + angle_weight * std::abs(std::atan2(std::abs(dy), dx));
}

TracePath least_cost_path(const ColumnNodes& nodes, const RowBand& band,
                          const TraceConfig& config) {
  std::vector<const std::vector<CandidateNode>*> cols;
  for (const auto& c : nodes.columns) {
    if (!c.empty()) cols.push_back(&c);
  }
  if (cols.empty()) throw NoSignalError("no candidate nodes in band");

  const double centre = band.center();
  const double tol = config.tie_tolerance;

  struct State {
    double cost;
    double deviation;  // summed |y - centre| along the prefix
    std::size_t rank;  // lexicographic order of the prefix's y sequence
    int pred;
  };
  std::vector<std::vector<State>> states(cols.size());

  // Orders prefixes ending in the same column; true when a beats b.
  const auto better = [tol](const State& a, const State& b) {
    if (std::abs(a.cost - b.cost) > tol) return a.cost < b.cost;
    if (std::abs(a.deviation - b.deviation) > tol) return a.deviation < b.deviation;
    return a.rank < b.rank;
  };
  const auto assign_ranks = [](std::vector<State>& st, const std::vector<CandidateNode>& col,
                               const std::vector<State>* prev) {
    std::vector<std::size_t> order(st.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (prev) {
        const auto ra = (*prev)[static_cast<std::size_t>(st[a].pred)].rank;
        const auto rb = (*prev)[static_cast<std::size_t>(st[b].pred)].rank;
        if (ra != rb) return ra < rb;
      }
      return col[a].y_center < col[b].y_center;
    });
    for (std::size_t r = 0; r < order.size(); ++r) st[order[r]].rank = r;
  };

  {
    const auto& first = *cols.front();
    states[0].resize(first.size());
    for (std::size_t j = 0; j < first.size(); ++j) {
      states[0][j] = {0.0, std::abs(first[j].y_center - centre), 0, -1};
    }
    assign_ranks(states[0], first, nullptr);
  }

  for (std::size_t k = 1; k < cols.size(); ++k) {
    const auto& prev_nodes = *cols[k - 1];
    const auto& here = *cols[k];
    const auto& prev = states[k - 1];
    auto& cur = states[k];
    cur.resize(here.size());
    for (std::size_t j = 0; j < here.size(); ++j) {
      const double dev = std::abs(here[j].y_center - centre);
      State best{std::numeric_limits<double>::infinity(), 0.0, 0, -1};
      for (std::size_t i = 0; i < prev_nodes.size(); ++i) {
        State cand{prev[i].cost + edge_cost(prev_nodes[i], here[j], config.angle_weight),
                   prev[i].deviation + dev, prev[i].rank, static_cast<int>(i)};
        if (best.pred < 0 || better(cand, best)) best = cand;
      }
      cur[j] = best;
    }
    assign_ranks(cur, here, &prev);
  }

  const auto& last = states.back();
  std::size_t pick = 0;
  for (std::size_t j = 1; j < last.size(); ++j) {
    if (better(last[j], last[pick])) pick = j;
  }

  TracePath path;
  path.band = band;
  path.total_cost = last[pick].cost;
  path.entries.resize(cols.size());
  int idx = static_cast<int>(pick);
  for (std::size_t k = cols.size(); k-- > 0;) {
    const auto& node = (*cols[k])[static_cast<std::size_t>(idx)];
    path.entries[k] = {node.col, node.y_center};
    idx = states[k][static_cast<std::size_t>(idx)].pred;
  }
  return path;
}

std::vector<double> fill_gaps(const TracePath& path, int col_begin, int col_end) {
  if (path.entries.empty()) throw ContractViolation("cannot densify an empty path");
  std::vector<double> dense(static_cast<std::size_t>(std::max(0, col_end - col_begin)));
  const auto& e = path.entries;
  std::size_t seg = 0;
  for (int col = col_begin; col < col_end; ++col) {
    double y;
    if (col <= e.front().col) {
      y = e.front().y;
    } else if (col >= e.back().col) {
      y = e.back().y;
    } else {
      while (e[seg + 1].col < col) ++seg;
      const auto& a = e[seg];
      const auto& b = e[seg + 1];
      const double f = static_cast<double>(col - a.col) / (b.col - a.col);
      y = a.y + f * (b.y - a.y);
    }
    dense[static_cast<std::size_t>(col - col_begin)] = y;
  }
  return dense;
}

RgbImage trace_overlay(const InkMask& mask, const RowBand& band, const ColumnNodes& nodes,
                       const TracePath& path) {
  RgbImage out = RgbImage::filled(mask.width, mask.height, 255, 255, 255);
  for (int y = 0; y < mask.height; ++y) {
    const bool inside = y >= band.y_top && y < band.y_bottom;
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        const std::uint8_t v = inside ? 160 : 220;
        out.set(x, y, v, v, v);
      } else if (!inside) {
        out.set(x, y, 240, 240, 240);
      }
    }
  }
  for (const auto& column : nodes.columns) {
    for (const auto& n : column) {
      out.set(n.col, static_cast<int>(std::floor(n.y_center)), 0, 0, 255);
    }
  }
  for (const auto& e : path.entries) {
    out.set(e.col, static_cast<int>(std::floor(e.y)), 255, 0, 0);
  }
  return out;
}

}  // namespace ecgscan
