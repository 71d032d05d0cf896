#pragma once

#include <string>
#include <vector>

#include "ofbvr/qoe.hpp"
#include "ofbvr/tiling.hpp"

namespace ofbvr {

// Per-chunk tile tables. `plain_scores` are the same cells scored with zero
// JND thresholds (plain PSNR); the fixed-grid baseline allocates against
// them while everything is still judged on the perceptual scores.
struct ChunkScores {
  TileScoreGrid perceptual;
  std::vector<double> plain_scores;  // same [row][col][level] indexing
};

// Stand-in for the encoded tile store: everything a playback session needs
// to know about one video.
struct VideoManifest {
  std::string video_id;
  int chunk_count = 0;
  double chunk_duration = 1.0;
  QualityLadder ladder;
  TileLayout layout;
  std::vector<ChunkScores> chunks;

  void validate() const {
    ladder.validate();
    layout.validate();
    if (chunk_count <= 0 || static_cast<int>(chunks.size()) != chunk_count)
      throw InputError("manifest chunk table size mismatch");
    if (!(chunk_duration > 0)) throw InputError("chunk duration must be > 0");
    for (const ChunkScores& cs : chunks) {
      if (cs.perceptual.rows != layout.rows ||
          cs.perceptual.cols != layout.cols ||
          cs.perceptual.n_levels != ladder.levels())
        throw InputError("chunk grid inconsistent with layout/ladder");
      if (cs.plain_scores.size() != cs.perceptual.scores.size())
        throw InputError("plain score table size mismatch");
    }
  }
};

}  // namespace ofbvr
