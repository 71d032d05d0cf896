#pragma once

#include <vector>

#include "ofbvr/core.hpp"
#include "ofbvr/tiling.hpp"

namespace ofbvr {

enum class Area { kCore, kSurround, kOutside };

// Labels every rect by its position relative to the predicted viewpoint:
// core intersects the fov x fov window, surround intersects the widened
// (fov + 2*margin) window, everything else is outside. Yaw windows wrap
// around the +-180 seam; grazing boundaries do not count as intersection.
std::vector<Area> classify_areas(const TileLayout& layout,
                                 const ViewpointSample& predicted,
                                 double fov_deg = 100.0,
                                 double margin_deg = 30.0);

// 0-based indices (row * cols + col) of the basic tiles visible in the fov
// window around the given viewpoint.
std::vector<int> viewport_cells(int rows, int cols,
                                const ViewpointSample& viewpoint,
                                double fov_deg);

}  // namespace ofbvr
