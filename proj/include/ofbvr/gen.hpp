#pragma once

#include <cstdint>

#include "ofbvr/manifest.hpp"
#include "ofbvr/sim.hpp"

namespace ofbvr {

// Moving-pattern video: textured background plus translating foreground
// rectangles, everything a deterministic function of (spec, seed).
struct VideoSpec {
  int width = 192;
  int height = 96;
  int fps = 4;  // synthesized frames per chunk second
  int chunk_count = 48;
  double chunk_duration = 1.0;
  int foreground_count = 2;
  double foreground_speed = 3.0;  // px per frame, horizontal
  int foreground_w = 48;
  int foreground_h = 24;
  int tile_k = 50;
  double jnd_lambda = 3.0 / 96.0;
  double size_base = 300.0;  // bytes per cell at the coarsest level
  double cap_db = 100.0;
  int flow_block = 16;
  int flow_radius = 7;
  double background_eps = 0.5;
};

// Frame `index` of the synthetic video; random access, deterministic.
Frame synthetic_frame(const VideoSpec& spec, std::uint64_t seed, int index);

// Runs the whole offline pipeline: flow, JND, per-chunk perceptual and
// plain tile scores, the byte-size model, and the variance-minimizing
// layout. The reference viewer for the JND maps sits still at the frame
// center.
VideoManifest gen_synthetic_video(const VideoSpec& spec, std::uint64_t seed);

enum class BwProfile { kConstant, kTwoBand, kRandomWalk };

struct BwSpec {
  BwProfile profile = BwProfile::kTwoBand;
  double duration_s = 600.0;
  // constant
  double level_bps = 5e6;
  // two_band
  double high_bps = 8e6;
  double low_bps = 1e6;
  double period_s = 10.0;
  // random_walk (multiplicative, clamped)
  double start_bps = 5e6;
  double min_bps = 2e5;
  double max_bps = 2e7;
  double step_sigma = 0.25;
  double sample_dt = 1.0;
};

BandwidthTrace gen_synthetic_bw(const BwSpec& spec, std::uint64_t seed);

// Smooth yaw drift with occasional saccade jumps; pitch wanders gently.
struct VpSpec {
  double duration_s = 60.0;
  double rate_hz = 30.0;
  double drift_deg_per_s = 25.0;  // typical yaw speed scale
  double jump_per_s = 0.05;       // saccade probability per second
  double pitch_amp_deg = 20.0;
};

ViewpointTrace gen_synthetic_vp(const VpSpec& spec, std::uint64_t seed);

// Uniformly rescales every sample so the time-weighted mean hits the target.
BandwidthTrace scale_trace(const BandwidthTrace& trace, double target_mean_bps);

}  // namespace ofbvr
