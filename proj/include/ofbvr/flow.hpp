#pragma once

#include "ofbvr/core.hpp"

namespace ofbvr {

// Exhaustive block-matching motion estimation: for every block of `prev`,
// searches all integer displacements in [-radius, radius]^2 (skipping ones
// that leave the frame) and keeps the displacement with minimal SAD against
// `next`. The zero vector wins ties. The winning vector is replicated to
// every pixel of its block. Edge blocks smaller than `block` are matched at
// their clipped size.
FlowField estimate_flow(const Frame& prev, const Frame& next, int block = 16,
                        int radius = 7);

// |F(i,j) - v| per pixel.
ScalarMap relative_velocity_map(const FlowField& flow, Vec2 viewpoint_velocity);

// Flow-magnitude depth proxy: pixels with |F| <= background_eps are treated
// as background and zeroed, the rest are normalized by the maximum magnitude
// into [0, 1]. An all-background field yields an all-zero map.
ScalarMap depth_proxy_map(const FlowField& flow, double background_eps = 0.5);

// |D(i,j) - D(viewpoint pixel)| per pixel.
ScalarMap relative_depth_map(const ScalarMap& depth,
                             const ViewpointSample& viewpoint);

// Equirectangular projection of (yaw, pitch) onto pixel indices:
// col = (yaw+180)/360 * W, row = (90-pitch)/180 * H, clamped to the frame.
void project_viewpoint(double yaw, double pitch, int width, int height,
                       int& row, int& col);

namespace serial {
// Plain-loop reference used to test the parallel kernel.
FlowField estimate_flow(const Frame& prev, const Frame& next, int block = 16,
                        int radius = 7);
}  // namespace serial

}  // namespace ofbvr
