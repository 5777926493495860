#pragma once

#include <cstddef>
#include <vector>

#include "ecgscan/raster.hpp"
#include "ecgscan/row_detect.hpp"

namespace ecgscan {

/// Midpoint of a maximal vertical run of ink pixels in one column.
struct CandidateNode {
  int col = 0;
  double y_center = 0.0;
  int run_len = 1;
};

/// Candidate nodes for the contiguous column range starting at first_col;
/// columns[i] holds the nodes of column first_col + i, top to bottom.
struct ColumnNodes {
  int first_col = 0;
  std::vector<std::vector<CandidateNode>> columns;

  std::size_t node_count() const;
  std::size_t non_empty_columns() const;
};

struct TraceConfig {
  double angle_weight = 5.0;  ///< px per radian
  int max_run_px = 50;
  /// Path costs closer than this are treated as ties.
  double tie_tolerance = 1e-9;
};

struct TracePoint {
  int col = 0;
  double y = 0.0;
};

struct TracePath {
  std::vector<TracePoint> entries;  ///< strictly increasing columns
  RowBand band;
  double total_cost = 0.0;
};

/// Nodes for columns [col_begin, col_end) inside `band`. Runs longer than
/// max_run_px are cut into max_run_px pieces, one node each.
ColumnNodes find_nodes(const InkMask& mask, const RowBand& band, int col_begin, int col_end,
                       const TraceConfig& config = {});

inline ColumnNodes find_nodes(const InkMask& mask, const RowBand& band,
                              const TraceConfig& config = {}) {
  return find_nodes(mask, band, 0, mask.width, config);
}

/// Euclidean length plus angle_weight * |atan2(|dy|, dx)|. Throws
/// ContractViolation unless b.col > a.col.
double edge_cost(const CandidateNode& a, const CandidateNode& b, double angle_weight = 5.0);

/// Minimum-cost chain through one node per non-empty column, where each node
/// links only to the nearest preceding non-empty column. Ties go to the path
/// with the smaller summed |y - band centre|, then to the smaller y at the
/// first column where candidates differ. Throws NoSignalError when every
/// column is empty.
TracePath least_cost_path(const ColumnNodes& nodes, const RowBand& band,
                          const TraceConfig& config = {});

/// Dense y for columns [col_begin, col_end): linear between entries,
/// constant beyond the first and last.
std::vector<double> fill_gaps(const TracePath& path, int col_begin, int col_end);

/// Debug view of one band: the mask in grey, candidate nodes in blue and
/// the chosen path in red. Pixels outside the band are dimmed.
RgbImage trace_overlay(const InkMask& mask, const RowBand& band, const ColumnNodes& nodes,
                       const TracePath& path);

}  // namespace ecgscan
