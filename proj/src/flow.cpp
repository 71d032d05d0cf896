#include "ofbvr/flow.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace ofbvr {

namespace {

void check_flow_inputs(const Frame& prev, const Frame& next, int block,
                       int radius) {
  if (prev.width() != next.width() || prev.height() != next.height())
    throw InputError("frame dimensions mismatch");
  if (block < 4) throw InputError("block size must be >= 4");
  if (radius < 1) throw InputError("search radius must be >= 1");
  if (prev.width() < block || prev.height() < block)
    throw InputError("frame smaller than one block");
}

// SAD between prev[r0..r1)x[c0..c1) and the same window shifted by (dx, dy)
// in next. Caller guarantees the shifted window stays inside the frame.
long block_sad(const Frame& prev, const Frame& next, int r0, int r1, int c0,
               int c1, int dy, int dx) {
  long sad = 0;
  for (int r = r0; r < r1; ++r) {
    const std::uint8_t* p = &prev.pixels.cells[static_cast<std::size_t>(r) *
                                               prev.width()];
    const std::uint8_t* n =
        &next.pixels.cells[static_cast<std::size_t>(r + dy) * next.width()];
    for (int c = c0; c < c1; ++c)
      sad += std::abs(static_cast<int>(p[c]) - static_cast<int>(n[c + dx]));
  }
  return sad;
}

// Best displacement for one block. Starts at (0, 0) and replaces only on a
// strict improvement, so the zero vector wins all ties.
Vec2 search_block(const Frame& prev, const Frame& next, int r0, int r1, int c0,
                  int c1, int radius) {
  int h = prev.height(), w = prev.width();
  long best = block_sad(prev, next, r0, r1, c0, c1, 0, 0);
  int best_dy = 0, best_dx = 0;
  for (int dy = -radius; dy <= radius; ++dy) {
    if (r0 + dy < 0 || r1 + dy > h) continue;
    for (int dx = -radius; dx <= radius; ++dx) {
      if (c0 + dx < 0 || c1 + dx > w) continue;
      if (dy == 0 && dx == 0) continue;
      long sad = block_sad(prev, next, r0, r1, c0, c1, dy, dx);
      if (sad < best) {
        best = sad;
        best_dy = dy;
        best_dx = dx;
      }
    }
  }
  return Vec2{static_cast<double>(best_dx), static_cast<double>(best_dy)};
}

void fill_block(FlowField& out, int r0, int r1, int c0, int c1, Vec2 v) {
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) out.at(r, c) = v;
}

}  // namespace

FlowField estimate_flow(const Frame& prev, const Frame& next, int block,
                        int radius) {
  check_flow_inputs(prev, next, block, radius);
  int h = prev.height(), w = prev.width();
  int nby = (h + block - 1) / block;
  int nbx = (w + block - 1) / block;
  FlowField out(w, h);
#pragma omp parallel for collapse(2) schedule(static)
  for (int by = 0; by < nby; ++by) {
    for (int bx = 0; bx < nbx; ++bx) {
      int r0 = by * block, r1 = std::min(r0 + block, h);
      int c0 = bx * block, c1 = std::min(c0 + block, w);
      Vec2 v = search_block(prev, next, r0, r1, c0, c1, radius);
      fill_block(out, r0, r1, c0, c1, v);
    }
  }
  return out;
}

namespace serial {

FlowField estimate_flow(const Frame& prev, const Frame& next, int block,
                        int radius) {
  check_flow_inputs(prev, next, block, radius);
  int h = prev.height(), w = prev.width();
  FlowField out(w, h);
  for (int r0 = 0; r0 < h; r0 += block) {
    for (int c0 = 0; c0 < w; c0 += block) {
      int r1 = std::min(r0 + block, h);
      int c1 = std::min(c0 + block, w);
      Vec2 v = search_block(prev, next, r0, r1, c0, c1, radius);
      fill_block(out, r0, r1, c0, c1, v);
    }
  }
  return out;
}

}  // namespace serial

ScalarMap relative_velocity_map(const FlowField& flow, Vec2 v) {
  ScalarMap out(flow.width, flow.height);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < flow.height; ++r) {
    for (int c = 0; c < flow.width; ++c) {
      const Vec2& f = flow.at(r, c);
      out.at(r, c) = std::hypot(f.dx - v.dx, f.dy - v.dy);
    }
  }
  return out;
}

ScalarMap depth_proxy_map(const FlowField& flow, double background_eps) {
  if (background_eps < 0) throw InputError("background_eps must be >= 0");
  ScalarMap out(flow.width, flow.height);
  double max_mag = 0.0;
  for (int r = 0; r < flow.height; ++r) {
    for (int c = 0; c < flow.width; ++c) {
      double m = flow.at(r, c).norm();
      double kept = m <= background_eps ? 0.0 : m;
      out.at(r, c) = kept;
      max_mag = std::max(max_mag, kept);
    }
  }
  if (max_mag == 0.0) return out;  // all background
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c) out.at(r, c) /= max_mag;
  return out;
}

void project_viewpoint(double yaw, double pitch, int width, int height,
                       int& row, int& col) {
  validate_angles(yaw, pitch);
  col = static_cast<int>((yaw + 180.0) / 360.0 * width);
  row = static_cast<int>((90.0 - pitch) / 180.0 * height);
  // pitch = -90 maps to the row just past the bottom edge
  col = std::clamp(col, 0, width - 1);
  row = std::clamp(row, 0, height - 1);
}

ScalarMap relative_depth_map(const ScalarMap& depth,
                             const ViewpointSample& viewpoint) {
  int row0 = 0, col0 = 0;
  project_viewpoint(viewpoint.yaw, viewpoint.pitch, depth.width, depth.height,
                    row0, col0);
  double d0 = depth.at(row0, col0);
  ScalarMap out(depth.width, depth.height);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < depth.height; ++r)
    for (int c = 0; c < depth.width; ++c)
      out.at(r, c) = std::abs(depth.at(r, c) - d0);
  return out;
}

}  // namespace ofbvr
