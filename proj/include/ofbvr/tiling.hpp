#pragma once

#include <optional>
#include <vector>

#include "ofbvr/core.hpp"

namespace ofbvr {

// Axis-aligned group of basic tiles; indices are 1-based and inclusive,
// rows in 1..grid_rows, columns in 1..grid_cols.
struct TileRect {
  int x1 = 1, x2 = 1;  // row range
  int y1 = 1, y2 = 1;  // column range

  int rows() const { return x2 - x1 + 1; }
  int cols() const { return y2 - y1 + 1; }
  int cell_count() const { return rows() * cols(); }
  bool contains(int row1b, int col1b) const {
    return row1b >= x1 && row1b <= x2 && col1b >= y1 && col1b <= y2;
  }
};

inline bool operator==(const TileRect& a, const TileRect& b) {
  return a.x1 == b.x1 && a.x2 == b.x2 && a.y1 == b.y1 && a.y2 == b.y2;
}

enum class CutDirection { kHorizontal, kVertical };

struct Cut {
  CutDirection direction = CutDirection::kHorizontal;
  // Horizontal: the upper child keeps rows x1..position. Vertical: the left
  // child keeps columns y1..position.
  int position = 0;
  double gain = 0.0;
};

struct TileLayout {
  int rows = kGridRows;
  int cols = kGridCols;
  int k = 1;
  std::vector<TileRect> rects;

  static TileLayout unit_grid(int rows, int cols);
  // Throws unless the rects disjointly cover the whole grid.
  void validate() const;
  // Index of the rect containing a (0-based) cell.
  int rect_of_cell(int row, int col) const;
};

// Within-group sum of squares of E over the rect: population variance times
// the cell count, so summing over a partition gives the total variance
// objective. Zero for single cells.
double rect_variance(const TileRect& rect, const Grid<double>& e);

// Best single cut of the rect: minimizes the children's summed variance.
// Ties break horizontal before vertical, then smaller position. Empty for
// 1x1 rects.
std::optional<Cut> get_best_cut(const TileRect& rect, const Grid<double>& e);

// Greedy variance-minimizing partition: starting from the whole grid,
// applies the best (rect, cut) pair among all current rects, k-1 times.
TileLayout build_layout(const Grid<double>& e, int k);

}  // namespace ofbvr
