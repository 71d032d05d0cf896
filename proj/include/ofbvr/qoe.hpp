#pragma once

#include <string>
#include <vector>

#include "ofbvr/core.hpp"

namespace ofbvr {

// Quality levels in visual-quality order: index 0 is the blank level,
// 1 is the coarsest encode and the last index the finest.
struct QualityLadder {
  std::vector<std::string> labels;

  static QualityLadder standard() {
    return {{"blank", "qp40", "qp35", "qp30", "qp25", "qp20"}};
  }
  int levels() const { return static_cast<int>(labels.size()); }
  int blank() const { return 0; }
  int top() const { return levels() - 1; }
  void validate() const {
    if (levels() < 2) throw InputError("quality ladder needs >= 2 levels");
  }
};

// Per-basic-tile PSNR-OF score and byte size for every quality level.
struct TileScoreGrid {
  int rows = kGridRows;
  int cols = kGridCols;
  int n_levels = 6;
  std::vector<double> scores;  // [row][col][level], dB
  std::vector<double> sizes;   // [row][col][level], bytes

  TileScoreGrid() = default;
  TileScoreGrid(int r, int c, int levels)
      : rows(r), cols(c), n_levels(levels),
        scores(static_cast<std::size_t>(r) * c * levels, 0.0),
        sizes(static_cast<std::size_t>(r) * c * levels, 0.0) {}

  std::size_t idx(int r, int c, int l) const {
    return (static_cast<std::size_t>(r) * cols + c) * n_levels + l;
  }
  double score(int r, int c, int l) const { return scores[idx(r, c, l)]; }
  double& score(int r, int c, int l) { return scores[idx(r, c, l)]; }
  double size(int r, int c, int l) const { return sizes[idx(r, c, l)]; }
  double& size(int r, int c, int l) { return sizes[idx(r, c, l)]; }
};

// k(i,j) = (sgn(|I - Ihat| - JND) + 1) / 2, so 0 below threshold, 1 above,
// 0.5 at exact equality.
ScalarMap visibility_mask(const Frame& orig, const Frame& enc,
                          const JndMap& jnd);

// Mean over pixels of (|I - Ihat| * k)^2.
double mse_of(const Frame& orig, const Frame& enc, const JndMap& jnd);

// 20*log10((2^N - 1)/sqrt(MSE)), clamped to cap_db (also when MSE = 0).
double psnr_of(const Frame& orig, const Frame& enc, const JndMap& jnd,
               double cap_db = 100.0);

// Per-cell PSNR-OF on the basic grid for every non-blank level; the blank
// level scores 0 dB. Byte sizes are left zero, they come from the manifest
// generator.
TileScoreGrid tile_scores(const Frame& orig,
                          const std::vector<Frame>& enc_per_level,
                          const JndMap& jnd, const QualityLadder& ladder,
                          double cap_db = 100.0);

// E = (score(l_high) - score(l_low)) / (l_high - l_low) per cell.
Grid<double> efficiency(const TileScoreGrid& grid, int l_high, int l_low);

// Synthetic distortion standing in for a real encoder: uniform quantization
// with step 2^(7-level) followed by (6-level)/2 passes of 3x3 box blur.
// Distortion strictly decreases with level; level is 1-based (the coarsest
// non-blank rung).
Frame synthetic_encode(const Frame& orig, int level);

namespace serial {
double mse_of(const Frame& orig, const Frame& enc, const JndMap& jnd);
TileScoreGrid tile_scores(const Frame& orig,
                          const std::vector<Frame>& enc_per_level,
                          const JndMap& jnd, const QualityLadder& ladder,
                          double cap_db = 100.0);
}  // namespace serial

}  // namespace ofbvr
