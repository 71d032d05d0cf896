#include "ofbvr/tiling.hpp"

#include <algorithm>

namespace ofbvr {

namespace {

void check_rect(const TileRect& r, const Grid<double>& e) {
  if (r.x1 < 1 || r.y1 < 1 || r.x1 > r.x2 || r.y1 > r.y2 ||
      r.x2 > e.height || r.y2 > e.width)
    throw InputError("rect out of grid bounds");
}

struct RangeSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  double ss() const { return n == 0 ? 0.0 : sum_sq - sum * sum / n; }
};

RangeSums rect_sums(const TileRect& r, const Grid<double>& e) {
  RangeSums s;
  for (int row = r.x1; row <= r.x2; ++row) {
    for (int col = r.y1; col <= r.y2; ++col) {
      double v = e.at(row - 1, col - 1);
      s.sum += v;
      s.sum_sq += v * v;
      ++s.n;
    }
  }
  return s;
}

// Candidate ordering for equal gains: horizontal before vertical, then
// smaller position, then smaller (x1, y1). Makes the greedy total.
bool cut_beats(const TileRect& ra, const Cut& a, const TileRect& rb,
               const Cut& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.direction != b.direction)
    return a.direction == CutDirection::kHorizontal;
  if (a.position != b.position) return a.position < b.position;
  if (ra.x1 != rb.x1) return ra.x1 < rb.x1;
  return ra.y1 < rb.y1;
}

}  // namespace

double rect_variance(const TileRect& rect, const Grid<double>& e) {
  check_rect(rect, e);
  double ss = rect_sums(rect, e).ss();
  return ss < 0.0 ? 0.0 : ss;  // guard tiny negative rounding
}

std::optional<Cut> get_best_cut(const TileRect& rect, const Grid<double>& e) {
  check_rect(rect, e);
  if (rect.cell_count() == 1) return std::nullopt;

  double parent_ss = rect_variance(rect, e);
  std::optional<Cut> best;

  auto consider = [&](CutDirection dir, int pos, double children_ss) {
    Cut cand{dir, pos, parent_ss - children_ss};
    if (!best || cut_beats(rect, cand, rect, *best)) best = cand;
  };

  // Horizontal cuts: rows x1..pos | pos+1..x2. Sweep rows once, keeping a
  // running sum for the upper child.
  if (rect.rows() > 1) {
    RangeSums total = rect_sums(rect, e);
    RangeSums upper;
    for (int pos = rect.x1; pos < rect.x2; ++pos) {
      RangeSums row =
          rect_sums(TileRect{pos, pos, rect.y1, rect.y2}, e);
      upper.sum += row.sum;
      upper.sum_sq += row.sum_sq;
      upper.n += row.n;
      RangeSums lower{total.sum - upper.sum, total.sum_sq - upper.sum_sq,
                      total.n - upper.n};
      consider(CutDirection::kHorizontal, pos, upper.ss() + lower.ss());
    }
  }
  if (rect.cols() > 1) {
    RangeSums total = rect_sums(rect, e);
    RangeSums left;
    for (int pos = rect.y1; pos < rect.y2; ++pos) {
      RangeSums col =
          rect_sums(TileRect{rect.x1, rect.x2, pos, pos}, e);
      left.sum += col.sum;
      left.sum_sq += col.sum_sq;
      left.n += col.n;
      RangeSums right{total.sum - left.sum, total.sum_sq - left.sum_sq,
                      total.n - left.n};
      consider(CutDirection::kVertical, pos, left.ss() + right.ss());
    }
  }
  if (best && best->gain < 0.0) best->gain = 0.0;  // rounding guard
  return best;
}

TileLayout build_layout(const Grid<double>& e, int k) {
  int max_k = e.width * e.height;
  if (k < 1 || k > max_k) throw InputError("tile count out of range");

  TileLayout layout;
  layout.rows = e.height;
  layout.cols = e.width;
  layout.k = k;
  layout.rects = {TileRect{1, e.height, 1, e.width}};

  for (int step = 1; step < k; ++step) {
    int best_idx = -1;
    Cut best_cut{};
    for (std::size_t i = 0; i < layout.rects.size(); ++i) {
      auto cut = get_best_cut(layout.rects[i], e);
      if (!cut) continue;
      if (best_idx < 0 ||
          cut_beats(layout.rects[i], *cut, layout.rects[best_idx], best_cut)) {
        best_idx = static_cast<int>(i);
        best_cut = *cut;
      }
    }
    if (best_idx < 0) throw InputError("no splittable rect left");
    TileRect parent = layout.rects[best_idx];
    TileRect a = parent, b = parent;
    if (best_cut.direction == CutDirection::kHorizontal) {
      a.x2 = best_cut.position;
      b.x1 = best_cut.position + 1;
    } else {
      a.y2 = best_cut.position;
      b.y1 = best_cut.position + 1;
    }
    layout.rects[best_idx] = a;
    layout.rects.push_back(b);
  }
  layout.validate();
  return layout;
}

TileLayout TileLayout::unit_grid(int rows, int cols) {
  TileLayout layout;
  layout.rows = rows;
  layout.cols = cols;
  layout.k = rows * cols;
  layout.rects.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 1; r <= rows; ++r)
    for (int c = 1; c <= cols; ++c)
      layout.rects.push_back(TileRect{r, r, c, c});
  return layout;
}

void TileLayout::validate() const {
  Grid<int> covered(cols, rows, 0);
  for (const TileRect& r : rects) {
    if (r.x1 < 1 || r.y1 < 1 || r.x1 > r.x2 || r.y1 > r.y2 || r.x2 > rows ||
        r.y2 > cols)
      throw InputError("layout rect out of bounds");
    for (int row = r.x1; row <= r.x2; ++row)
      for (int col = r.y1; col <= r.y2; ++col) {
        if (covered.at(row - 1, col - 1)++)
          throw InputError("layout rects overlap");
      }
  }
  for (int v : covered.cells)
    if (!v) throw InputError("layout does not cover the grid");
}

int TileLayout::rect_of_cell(int row, int col) const {
  for (std::size_t i = 0; i < rects.size(); ++i)
    if (rects[i].contains(row + 1, col + 1)) return static_cast<int>(i);
  return -1;
}

}  // namespace ofbvr
