#include "ofbvr/gen.hpp"

#include <algorithm>
#include <cmath>

#include "ofbvr/flow.hpp"
#include "ofbvr/jnd.hpp"
#include "ofbvr/rng.hpp"

namespace ofbvr {

namespace {

std::uint8_t noise_u8(std::uint64_t seed, int x, int y, std::uint64_t stream) {
  std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x))
                       << 32) |
                      static_cast<std::uint32_t>(y);
  return static_cast<std::uint8_t>(
      mix_seed(seed ^ mix_seed(stream, 0x0f0f0f0fULL), key) >> 56);
}

struct ForegroundSpec {
  int row0;
  int col0;
  std::uint8_t bias;
};

ForegroundSpec foreground_geometry(const VideoSpec& spec, std::uint64_t seed,
                                   int i) {
  int fh = std::min(spec.foreground_h, spec.height);
  Rng rng(mix_seed(seed, 0xf9 + static_cast<std::uint64_t>(i)));
  ForegroundSpec fg;
  fg.row0 = rng.uniform_int(0, std::max(spec.height - fh, 0));
  fg.col0 = rng.uniform_int(0, spec.width - 1);
  fg.bias = i % 2 == 0 ? 200 : 40;  // alternate bright/dark objects
  return fg;
}

}  // namespace

Frame synthetic_frame(const VideoSpec& spec, std::uint64_t seed, int index) {
  if (index < 0) throw InputError("frame index must be >= 0");
  int w = spec.width, h = spec.height;
  Frame frame(w, h);

  // background: lightly smoothed static noise, mid contrast
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx)
          sum += noise_u8(seed, (x + dx) % w, (y + dy) % h, 1);
      frame.at(y, x) = static_cast<std::uint8_t>(64 + (sum / 4) / 2);
    }
  }

  // translating textured foreground rectangles (horizontal wrap)
  int fw = std::min(spec.foreground_w, spec.width);
  int fh = std::min(spec.foreground_h, spec.height);
  for (int i = 0; i < spec.foreground_count; ++i) {
    ForegroundSpec fg = foreground_geometry(spec, seed, i);
    int shift = static_cast<int>(
        std::floor(spec.foreground_speed * index + 0.5));
    int off = ((fg.col0 + shift) % w + w) % w;
    for (int y = fg.row0; y < fg.row0 + fh; ++y) {
      for (int lx = 0; lx < fw; ++lx) {
        int x = (off + lx) % w;
        int tex = noise_u8(seed, lx, y - fg.row0, 16 + i) / 4;
        int v = fg.bias + tex - 32;
        frame.at(y, x) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
    }
  }
  return frame;
}

VideoManifest gen_synthetic_video(const VideoSpec& spec, std::uint64_t seed) {
  if (spec.width % kGridCols != 0 || spec.height % kGridRows != 0)
    throw InputError("video dimensions must tile the basic grid");
  if (spec.chunk_count < 1 || spec.fps < 2)
    throw InputError("need >= 1 chunk and >= 2 fps");

  QualityLadder ladder = QualityLadder::standard();
  int n_levels = ladder.levels();
  int w = spec.width, h = spec.height;
  int cell_h = h / kGridRows, cell_w = w / kGridCols;

  VideoManifest manifest;
  manifest.video_id = "synthetic-" + std::to_string(seed);
  manifest.chunk_count = spec.chunk_count;
  manifest.chunk_duration = spec.chunk_duration;
  manifest.ladder = ladder;
  manifest.chunks.reserve(spec.chunk_count);

  ScalarMap zero_jnd(w, h, 0.0);
  ViewpointSample center{};  // reference viewer: still, frame center
  Grid<double> e_sum(kGridCols, kGridRows, 0.0);

  for (int c = 0; c < spec.chunk_count; ++c) {
    int f0 = c * spec.fps;
    Frame first = synthetic_frame(spec, seed, f0);
    Frame second = synthetic_frame(spec, seed, f0 + 1);
    FlowField flow =
        estimate_flow(first, second, spec.flow_block, spec.flow_radius);
    ScalarMap dv = relative_velocity_map(flow, Vec2{0.0, 0.0});
    ScalarMap depth = depth_proxy_map(flow, spec.background_eps);
    ScalarMap dd = relative_depth_map(depth, center);
    JndMap jnd = joint_jnd(dv, dd, JndConfig{spec.jnd_lambda});

    TileScoreGrid perceptual(kGridRows, kGridCols, n_levels);
    TileScoreGrid plain(kGridRows, kGridCols, n_levels);
    for (int k = 0; k < spec.fps; ++k) {
      Frame orig = k == 0 ? first : synthetic_frame(spec, seed, f0 + k);
      std::vector<Frame> encs;
      encs.reserve(n_levels - 1);
      for (int l = 1; l < n_levels; ++l)
        encs.push_back(synthetic_encode(orig, l));
      TileScoreGrid gp = tile_scores(orig, encs, jnd, ladder, spec.cap_db);
      TileScoreGrid gq =
          tile_scores(orig, encs, zero_jnd, ladder, spec.cap_db);
      for (std::size_t i = 0; i < gp.scores.size(); ++i) {
        perceptual.scores[i] += gp.scores[i] / spec.fps;
        plain.scores[i] += gq.scores[i] / spec.fps;
      }
    }
    // quality must not decrease with the level index
    for (int r = 0; r < kGridRows; ++r) {
      for (int col = 0; col < kGridCols; ++col) {
        for (int l = 2; l < n_levels; ++l) {
          perceptual.score(r, col, l) = std::max(perceptual.score(r, col, l),
                                                 perceptual.score(r, col, l - 1));
          plain.score(r, col, l) =
              std::max(plain.score(r, col, l), plain.score(r, col, l - 1));
        }
      }
    }

    // byte model: size = base * 2^(l-1) * texture factor of the cell
    for (int r = 0; r < kGridRows; ++r) {
      for (int col = 0; col < kGridCols; ++col) {
        double mean = 0.0, sq = 0.0;
        for (int y = r * cell_h; y < (r + 1) * cell_h; ++y) {
          for (int x = col * cell_w; x < (col + 1) * cell_w; ++x) {
            double v = first.at(y, x);
            mean += v;
            sq += v * v;
          }
        }
        double n = static_cast<double>(cell_h) * cell_w;
        mean /= n;
        double sd = std::sqrt(std::max(sq / n - mean * mean, 0.0));
        double tf = std::clamp(0.5 + sd / 48.0, 0.5, 2.0);
        perceptual.size(r, col, 0) = 0.0;
        for (int l = 1; l < n_levels; ++l)
          perceptual.size(r, col, l) =
              std::round(spec.size_base * std::pow(2.0, l - 1) * tf);
      }
    }
    plain.sizes = perceptual.sizes;

    Grid<double> e = efficiency(perceptual, n_levels - 1, 1);
    for (std::size_t i = 0; i < e.cells.size(); ++i)
      e_sum.cells[i] += e.cells[i] / spec.chunk_count;

    ChunkScores cs;
    cs.perceptual = std::move(perceptual);
    cs.plain_scores = std::move(plain.scores);
    manifest.chunks.push_back(std::move(cs));
  }

  manifest.layout = build_layout(e_sum, spec.tile_k);
  manifest.validate();
  return manifest;
}

BandwidthTrace gen_synthetic_bw(const BwSpec& spec, std::uint64_t seed) {
  if (!(spec.duration_s > 0)) throw InputError("duration must be > 0");
  BandwidthTrace trace;
  switch (spec.profile) {
    case BwProfile::kConstant: {
      if (!(spec.level_bps > 0)) throw InputError("level must be > 0");
      trace.samples = {{0.0, spec.level_bps}, {spec.duration_s, spec.level_bps}};
      break;
    }
    case BwProfile::kTwoBand: {
      if (!(spec.high_bps > 0) || !(spec.low_bps > 0) || !(spec.period_s > 0))
        throw InputError("two-band levels and period must be > 0");
      int bands = static_cast<int>(std::ceil(spec.duration_s / spec.period_s));
      for (int i = 0; i < bands; ++i)
        trace.samples.push_back(
            {i * spec.period_s, i % 2 == 0 ? spec.high_bps : spec.low_bps});
      trace.samples.push_back(
          {spec.duration_s, bands % 2 == 0 ? spec.high_bps : spec.low_bps});
      break;
    }
    case BwProfile::kRandomWalk: {
      if (!(spec.start_bps > 0) || !(spec.min_bps > 0) ||
          !(spec.max_bps >= spec.min_bps) || !(spec.sample_dt > 0))
        throw InputError("bad random-walk parameters");
      Rng rng(seed);
      double v = std::clamp(spec.start_bps, spec.min_bps, spec.max_bps);
      for (double t = 0.0;; t += spec.sample_dt) {
        trace.samples.push_back({t, v});
        if (t >= spec.duration_s) break;
        v = std::clamp(v * std::exp(spec.step_sigma * rng.gaussian()),
                       spec.min_bps, spec.max_bps);
      }
      break;
    }
  }
  trace.validate();
  return trace;
}

ViewpointTrace gen_synthetic_vp(const VpSpec& spec, std::uint64_t seed) {
  if (!(spec.duration_s > 0) || !(spec.rate_hz > 0))
    throw InputError("bad viewpoint spec");
  Rng rng(seed);
  ViewpointTrace trace;
  double dt = 1.0 / spec.rate_hz;
  int n = static_cast<int>(std::ceil(spec.duration_s * spec.rate_hz)) + 1;
  double yaw = rng.uniform(-180.0, 180.0);
  double vel = rng.uniform(-spec.drift_deg_per_s, spec.drift_deg_per_s);
  double phase = rng.uniform(0.0, 6.283185307179586);
  trace.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    double t = i * dt;
    double pitch = std::clamp(
        spec.pitch_amp_deg * std::sin(t * 0.27 + phase), -89.0, 89.0);
    trace.samples.push_back({t, wrap_yaw(yaw), pitch, 0.0, 0.0});
    if (rng.uniform() < spec.jump_per_s * dt) {
      yaw = wrap_yaw(yaw + rng.uniform(60.0, 300.0));
      vel = rng.uniform(-spec.drift_deg_per_s, spec.drift_deg_per_s);
    } else {
      vel += rng.gaussian() * spec.drift_deg_per_s * 0.2 * std::sqrt(dt);
      vel = std::clamp(vel, -2.0 * spec.drift_deg_per_s,
                       2.0 * spec.drift_deg_per_s);
    }
    yaw += vel * dt;
  }
  trace.validate();
  return trace;
}

BandwidthTrace scale_trace(const BandwidthTrace& trace, double target_mean_bps) {
  if (!(target_mean_bps > 0)) throw InputError("target mean must be > 0");
  double mean = trace.time_weighted_mean();
  if (!(mean > 0)) throw InputError("cannot scale a zero-mean trace");
  double factor = target_mean_bps / mean;
  BandwidthTrace out = trace;
  for (auto& s : out.samples) s.bps *= factor;
  return out;
}

}  // namespace ofbvr
