#include "ofbvr/viewport.hpp"

#include <algorithm>
#include <cmath>

namespace ofbvr {

namespace {

// Arc on the yaw circle: [start, start + length), length in (0, 360].
struct YawArc {
  double start;
  double length;
};

double wrap360(double a) {
  double w = std::fmod(a, 360.0);
  if (w < 0) w += 360.0;
  return w;
}

bool arcs_overlap(const YawArc& a, const YawArc& b) {
  if (a.length >= 360.0 || b.length >= 360.0) return true;
  double off_ab = wrap360(b.start - a.start);
  double off_ba = wrap360(a.start - b.start);
  return off_ab < a.length || off_ba < b.length;
}

struct PitchBand {
  double lo;
  double hi;
};

bool bands_overlap(const PitchBand& a, const PitchBand& b) {
  return a.lo < b.hi && b.lo < a.hi;
}

struct Window {
  YawArc yaw;
  PitchBand pitch;
};

Window make_window(const ViewpointSample& vp, double extent_deg) {
  Window w;
  w.yaw = {wrap360(vp.yaw - extent_deg / 2.0 + 180.0) - 180.0,
           std::min(extent_deg, 360.0)};
  w.pitch = {std::max(vp.pitch - extent_deg / 2.0, -90.0),
             std::min(vp.pitch + extent_deg / 2.0, 90.0)};
  return w;
}

bool rect_hits_window(const TileRect& r, const Window& w, double deg_per_row,
                      double deg_per_col) {
  PitchBand band{90.0 - r.x2 * deg_per_row, 90.0 - (r.x1 - 1) * deg_per_row};
  YawArc arc{-180.0 + (r.y1 - 1) * deg_per_col,
             static_cast<double>(r.cols()) * deg_per_col};
  return bands_overlap(band, w.pitch) && arcs_overlap(arc, w.yaw);
}

}  // namespace

std::vector<Area> classify_areas(const TileLayout& layout,
                                 const ViewpointSample& predicted,
                                 double fov_deg, double margin_deg) {
  if (!(fov_deg > 0)) throw InputError("fov must be > 0");
  if (margin_deg < 0) throw InputError("margin must be >= 0");
  validate_angles(predicted.yaw, predicted.pitch);

  double deg_per_row = 180.0 / layout.rows;
  double deg_per_col = 360.0 / layout.cols;
  Window core = make_window(predicted, fov_deg);
  Window wide = make_window(predicted, fov_deg + 2.0 * margin_deg);

  std::vector<Area> labels(layout.rects.size(), Area::kOutside);
  for (std::size_t i = 0; i < layout.rects.size(); ++i) {
    const TileRect& r = layout.rects[i];
    if (rect_hits_window(r, core, deg_per_row, deg_per_col))
      labels[i] = Area::kCore;
    else if (rect_hits_window(r, wide, deg_per_row, deg_per_col))
      labels[i] = Area::kSurround;
  }
  return labels;
}

std::vector<int> viewport_cells(int rows, int cols,
                                const ViewpointSample& viewpoint,
                                double fov_deg) {
  if (!(fov_deg > 0)) throw InputError("fov must be > 0");
  validate_angles(viewpoint.yaw, viewpoint.pitch);
  double deg_per_row = 180.0 / rows;
  double deg_per_col = 360.0 / cols;
  Window w = make_window(viewpoint, fov_deg);
  std::vector<int> cells;
  for (int r = 1; r <= rows; ++r) {
    for (int c = 1; c <= cols; ++c) {
      if (rect_hits_window(TileRect{r, r, c, c}, w, deg_per_row, deg_per_col))
        cells.push_back((r - 1) * cols + (c - 1));
    }
  }
  return cells;
}

}  // namespace ofbvr
