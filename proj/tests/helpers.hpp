#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ofbvr/core.hpp"
#include "ofbvr/manifest.hpp"
#include "ofbvr/rng.hpp"

namespace ofbvr::test {

inline Frame noise_frame(int w, int h, std::uint64_t seed) {
  Frame f(w, h);
  Rng rng(seed);
  for (auto& p : f.pixels.cells)
    p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return f;
}

// Frame shifted by integer (dx, dy) with wrap padding.
inline Frame shift_wrap(const Frame& src, int dx, int dy) {
  int w = src.width(), h = src.height();
  Frame out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(y, x) = src.at(((y - dy) % h + h) % h, ((x - dx) % w + w) % w);
  return out;
}

// Smooth periodic pattern; periods divide (w, h) so fractional shifts wrap
// exactly.
inline double smooth_pattern(double x, double y, int w, int h) {
  double tau = 6.283185307179586;
  return 128.0 + 60.0 * std::sin(tau * 5.0 * x / w) * std::cos(tau * 3.0 * y / h) +
         25.0 * std::cos(tau * 11.0 * x / w + tau * 7.0 * y / h);
}

inline Frame pattern_frame(int w, int h, double shift_x, double shift_y) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = smooth_pattern(x - shift_x, y - shift_y, w, h);
      f.at(y, x) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  return f;
}

inline double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// Textbook PSNR, independent of the library path.
inline double reference_psnr(const Frame& a, const Frame& b, double cap_db) {
  double sse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    double d = static_cast<double>(a.pixels.cells[i]) -
               static_cast<double>(b.pixels.cells[i]);
    sse += d * d;
  }
  double mse = sse / static_cast<double>(a.pixels.size());
  if (mse <= 0.0) return cap_db;
  return std::min(20.0 * std::log10(255.0 / std::sqrt(mse)), cap_db);
}

// Uniform-score manifest on the unit 12x24 grid: score(l) = 10*l dB for
// every cell, cell size = cell_base * 2^(l-1) bytes.
inline VideoManifest test_manifest(int chunks, double cell_base = 100.0,
                                   int k_rects = 288) {
  VideoManifest m;
  m.video_id = "test";
  m.chunk_count = chunks;
  m.chunk_duration = 1.0;
  m.ladder = QualityLadder::standard();
  if (k_rects == 288) {
    m.layout = TileLayout::unit_grid(kGridRows, kGridCols);
  } else {
    Grid<double> e(kGridCols, kGridRows, 0.0);
    Rng rng(11);
    for (auto& v : e.cells) v = rng.uniform();
    m.layout = build_layout(e, k_rects);
  }
  for (int c = 0; c < chunks; ++c) {
    ChunkScores cs;
    cs.perceptual = TileScoreGrid(kGridRows, kGridCols, 6);
    for (int r = 0; r < kGridRows; ++r)
      for (int col = 0; col < kGridCols; ++col)
        for (int l = 1; l < 6; ++l) {
          cs.perceptual.score(r, col, l) = 10.0 * l;
          cs.perceptual.size(r, col, l) = cell_base * std::pow(2.0, l - 1);
        }
    cs.plain_scores = cs.perceptual.scores;
    m.chunks.push_back(std::move(cs));
  }
  m.validate();
  return m;
}

inline BandwidthTrace constant_bw(double bps, double duration) {
  return BandwidthTrace{{{0.0, bps}, {duration, bps}}};
}

inline ViewpointTrace static_vp(double duration, double yaw = 0.0,
                                double pitch = 0.0, double rate = 30.0) {
  ViewpointTrace t;
  int n = static_cast<int>(duration * rate) + 1;
  for (int i = 0; i < n; ++i)
    t.samples.push_back({i / rate, yaw, pitch, 0.0, 0.0});
  return t;
}

}  // namespace ofbvr::test
