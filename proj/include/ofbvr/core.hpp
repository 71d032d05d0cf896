#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofbvr {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Basic spatial grid over the equirectangular frame: 12 rows x 24 columns.
constexpr int kGridRows = 12;
constexpr int kGridCols = 24;

template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> cells;

  Grid() = default;
  Grid(int w, int h, T fill = T{})
      : width(w), height(h), cells(static_cast<std::size_t>(w > 0 ? w : 0) *
                                       static_cast<std::size_t>(h > 0 ? h : 0),
                                   fill) {
    if (w <= 0 || h <= 0) throw InputError("grid dimensions must be positive");
  }

  T& at(int row, int col) {
    return cells[static_cast<std::size_t>(row) * width + col];
  }
  const T& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t size() const { return cells.size(); }
  bool same_shape(const Grid& o) const {
    return width == o.width && height == o.height;
  }
};

struct Vec2 {
  double dx = 0.0;
  double dy = 0.0;
  double norm() const { return std::hypot(dx, dy); }
};

inline bool operator==(const Vec2& a, const Vec2& b) {
  return a.dx == b.dx && a.dy == b.dy;
}

using ScalarMap = Grid<double>;
using FlowField = Grid<Vec2>;
// Per-pixel distortion tolerances in grey levels.
using JndMap = ScalarMap;

// 8-bit grayscale frame. Width must divide into 24 columns and height into
// 12 rows so the basic tile grid covers it exactly.
struct Frame {
  Grid<std::uint8_t> pixels;
  int bit_depth = 8;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0, int depth = 8)
      : pixels(w, h, fill), bit_depth(depth) {
    if (w % kGridCols != 0 || h % kGridRows != 0)
      throw InputError("frame dimensions must tile the " +
                       std::to_string(kGridRows) + "x" +
                       std::to_string(kGridCols) + " basic grid");
    if (depth < 1 || depth > 8) throw InputError("bit depth must be in [1, 8]");
  }

  int width() const { return pixels.width; }
  int height() const { return pixels.height; }
  int max_value() const { return (1 << bit_depth) - 1; }
  std::uint8_t& at(int row, int col) { return pixels.at(row, col); }
  std::uint8_t at(int row, int col) const { return pixels.at(row, col); }
};

// One viewpoint record: angles in degrees, velocity in pixels per frame on
// the equirectangular plane.
struct ViewpointSample {
  double t = 0.0;
  double yaw = 0.0;    // [-180, 180)
  double pitch = 0.0;  // [-90, 90]
  double vx = 0.0;
  double vy = 0.0;
};

// Wraps an angle into [-180, 180).
inline double wrap_yaw(double yaw) {
  double y = std::fmod(yaw + 180.0, 360.0);
  if (y < 0) y += 360.0;
  return y - 180.0;
}

inline void validate_angles(double yaw, double pitch) {
  if (!(yaw >= -180.0 && yaw < 180.0))
    throw InputError("yaw out of range [-180, 180)");
  if (!(pitch >= -90.0 && pitch <= 90.0))
    throw InputError("pitch out of range [-90, 90]");
}

}  // namespace ofbvr
