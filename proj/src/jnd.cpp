#include "ofbvr/jnd.hpp"

#include <cmath>

namespace ofbvr {

double sjnd(double dv) {
  if (!(dv >= 0)) throw InputError("relative velocity must be >= 0");
  return 2.047 * std::pow(dv, 0.634) + 8.0;
}

double djnd(double dd) {
  if (!(dd >= 0)) throw InputError("relative depth must be >= 0");
  return dd < 1.0 ? 9.0 * dd + 12.0 : 29.0 * dd - 8.0;
}

namespace {

// Validation happens before the parallel loop; exceptions may not cross an
// OpenMP region boundary.
void check_jnd_inputs(const ScalarMap& dv_map, const ScalarMap& dd_map,
                      const JndConfig& cfg) {
  if (!dv_map.same_shape(dd_map)) throw InputError("map dimensions mismatch");
  if (!(cfg.lambda > 0)) throw InputError("lambda must be > 0");
  for (double v : dv_map.cells)
    if (!(v >= 0) || !std::isfinite(v))
      throw InputError("relative velocity must be finite and >= 0");
  for (double v : dd_map.cells)
    if (!(v >= 0) || !std::isfinite(v))
      throw InputError("relative depth must be finite and >= 0");
}

inline double joint_value(double dv, double dd, double lambda) {
  double s = 2.047 * std::pow(dv, 0.634) + 8.0;
  double d = dd < 1.0 ? 9.0 * dd + 12.0 : 29.0 * dd - 8.0;
  return lambda * s * d;
}

}  // namespace

JndMap joint_jnd(const ScalarMap& dv_map, const ScalarMap& dd_map,
                 const JndConfig& cfg) {
  check_jnd_inputs(dv_map, dd_map, cfg);
  JndMap out(dv_map.width, dv_map.height);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      out.at(r, c) = joint_value(dv_map.at(r, c), dd_map.at(r, c), cfg.lambda);
  return out;
}

namespace serial {

JndMap joint_jnd(const ScalarMap& dv_map, const ScalarMap& dd_map,
                 const JndConfig& cfg) {
  check_jnd_inputs(dv_map, dd_map, cfg);
  JndMap out(dv_map.width, dv_map.height);
  for (int r = 0; r < out.height; ++r)
    for (int c = 0; c < out.width; ++c)
      out.at(r, c) = cfg.lambda * sjnd(dv_map.at(r, c)) * djnd(dd_map.at(r, c));
  return out;
}

}  // namespace serial

}  // namespace ofbvr
