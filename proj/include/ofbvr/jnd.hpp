#pragma once

#include "ofbvr/core.hpp"

namespace ofbvr {

struct JndConfig {
  // Scales the raw SJND*DJND product. The raw floor is 96 grey levels; the
  // default maps it to 3, a conventional base tolerance for 8-bit video.
  // Set 1.0 for the unscaled product.
  double lambda = 3.0 / 96.0;
};

// Velocity factor: 2.047 * dv^0.634 + 8.
double sjnd(double dv);

// Depth factor: 9*dd + 12 for dd < 1, 29*dd - 8 for dd >= 1. Continuous at
// the breakpoint (both branches give 21).
double djnd(double dd);

// Per-pixel product lambda * sjnd(dv) * djnd(dd).
JndMap joint_jnd(const ScalarMap& dv_map, const ScalarMap& dd_map,
                 const JndConfig& cfg = {});

namespace serial {
JndMap joint_jnd(const ScalarMap& dv_map, const ScalarMap& dd_map,
                 const JndConfig& cfg = {});
}

}  // namespace ofbvr
