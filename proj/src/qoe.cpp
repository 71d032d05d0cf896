#include "ofbvr/qoe.hpp"

#include <algorithm>
#include <cmath>

namespace ofbvr {

namespace {

void check_pair(const Frame& orig, const Frame& enc, const JndMap& jnd) {
  if (orig.width() != enc.width() || orig.height() != enc.height() ||
      orig.width() != jnd.width || orig.height() != jnd.height)
    throw InputError("frame/JND dimensions mismatch");
}

inline double mask_value(double diff, double threshold) {
  double s = diff > threshold ? 1.0 : (diff < threshold ? -1.0 : 0.0);
  return (s + 1.0) / 2.0;
}

// Masked squared-error sum over a pixel window.
double masked_sse(const Frame& orig, const Frame& enc, const JndMap& jnd,
                  int r0, int r1, int c0, int c1) {
  double sse = 0.0;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      double diff = std::abs(static_cast<double>(orig.at(r, c)) -
                             static_cast<double>(enc.at(r, c)));
      double masked = diff * mask_value(diff, jnd.at(r, c));
      sse += masked * masked;
    }
  }
  return sse;
}

double psnr_from_mse(double mse, int max_value, double cap_db) {
  if (mse <= 0.0) return cap_db;
  double v = 20.0 * std::log10(static_cast<double>(max_value) / std::sqrt(mse));
  return std::min(v, cap_db);
}

}  // namespace

ScalarMap visibility_mask(const Frame& orig, const Frame& enc,
                          const JndMap& jnd) {
  check_pair(orig, enc, jnd);
  ScalarMap out(orig.width(), orig.height());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      double diff = std::abs(static_cast<double>(orig.at(r, c)) -
                             static_cast<double>(enc.at(r, c)));
      out.at(r, c) = mask_value(diff, jnd.at(r, c));
    }
  }
  return out;
}

double mse_of(const Frame& orig, const Frame& enc, const JndMap& jnd) {
  check_pair(orig, enc, jnd);
  int h = orig.height(), w = orig.width();
  // Per-row partials summed serially keep the result independent of the
  // thread count.
  std::vector<double> row_sse(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r)
    row_sse[r] = masked_sse(orig, enc, jnd, r, r + 1, 0, w);
  double total = 0.0;
  for (double v : row_sse) total += v;
  return total / (static_cast<double>(w) * h);
}

double psnr_of(const Frame& orig, const Frame& enc, const JndMap& jnd,
               double cap_db) {
  if (!(cap_db > 0)) throw InputError("cap_db must be > 0");
  return psnr_from_mse(mse_of(orig, enc, jnd), orig.max_value(), cap_db);
}

TileScoreGrid tile_scores(const Frame& orig,
                          const std::vector<Frame>& enc_per_level,
                          const JndMap& jnd, const QualityLadder& ladder,
                          double cap_db) {
  ladder.validate();
  if (static_cast<int>(enc_per_level.size()) != ladder.levels() - 1)
    throw InputError("one encoded frame required per non-blank level");
  for (const Frame& f : enc_per_level) check_pair(orig, f, jnd);
  if (!(cap_db > 0)) throw InputError("cap_db must be > 0");

  int cell_h = orig.height() / kGridRows;
  int cell_w = orig.width() / kGridCols;
  TileScoreGrid grid(kGridRows, kGridCols, ladder.levels());
  int n_cells = kGridRows * kGridCols;
#pragma omp parallel for schedule(static)
  for (int cell = 0; cell < n_cells; ++cell) {
    int gr = cell / kGridCols, gc = cell % kGridCols;
    int r0 = gr * cell_h, c0 = gc * cell_w;
    grid.score(gr, gc, 0) = 0.0;  // blank
    for (int l = 1; l < ladder.levels(); ++l) {
      double sse = masked_sse(orig, enc_per_level[l - 1], jnd, r0, r0 + cell_h,
                              c0, c0 + cell_w);
      double mse = sse / (static_cast<double>(cell_h) * cell_w);
      grid.score(gr, gc, l) = psnr_from_mse(mse, orig.max_value(), cap_db);
    }
  }
  return grid;
}

Grid<double> efficiency(const TileScoreGrid& grid, int l_high, int l_low) {
  if (l_high <= l_low) throw InputError("l_high must exceed l_low");
  if (l_low <= 0 || l_high >= grid.n_levels)
    throw InputError("efficiency levels must be non-blank and in range");
  Grid<double> e(grid.cols, grid.rows);
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c)
      e.at(r, c) = (grid.score(r, c, l_high) - grid.score(r, c, l_low)) /
                   static_cast<double>(l_high - l_low);
  return e;
}

Frame synthetic_encode(const Frame& orig, int level) {
  if (level < 1 || level > 5) throw InputError("encode level must be in 1..5");
  int step = 1 << (7 - level);
  int h = orig.height(), w = orig.width();
  Frame out(w, h, 0, orig.bit_depth);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      int q = (orig.at(r, c) / step) * step + step / 2;
      out.at(r, c) = static_cast<std::uint8_t>(std::min(q, orig.max_value()));
    }
  }
  int blur_passes = (6 - level) / 2;
  for (int pass = 0; pass < blur_passes; ++pass) {
    Frame src = out;
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        int sum = 0, n = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            sum += src.at(rr, cc);
            ++n;
          }
        }
        out.at(r, c) = static_cast<std::uint8_t>((sum + n / 2) / n);
      }
    }
  }
  return out;
}

namespace serial {

double mse_of(const Frame& orig, const Frame& enc, const JndMap& jnd) {
  check_pair(orig, enc, jnd);
  int h = orig.height(), w = orig.width();
  double total = 0.0;
  for (int r = 0; r < h; ++r) total += masked_sse(orig, enc, jnd, r, r + 1, 0, w);
  return total / (static_cast<double>(w) * h);
}

TileScoreGrid tile_scores(const Frame& orig,
                          const std::vector<Frame>& enc_per_level,
                          const JndMap& jnd, const QualityLadder& ladder,
                          double cap_db) {
  ladder.validate();
  if (static_cast<int>(enc_per_level.size()) != ladder.levels() - 1)
    throw InputError("one encoded frame required per non-blank level");
  for (const Frame& f : enc_per_level) check_pair(orig, f, jnd);

  int cell_h = orig.height() / kGridRows;
  int cell_w = orig.width() / kGridCols;
  TileScoreGrid grid(kGridRows, kGridCols, ladder.levels());
  for (int gr = 0; gr < kGridRows; ++gr) {
    for (int gc = 0; gc < kGridCols; ++gc) {
      int r0 = gr * cell_h, c0 = gc * cell_w;
      for (int l = 1; l < ladder.levels(); ++l) {
        double sse = masked_sse(orig, enc_per_level[l - 1], jnd, r0,
                                r0 + cell_h, c0, c0 + cell_w);
        double mse = sse / (static_cast<double>(cell_h) * cell_w);
        grid.score(gr, gc, l) = psnr_from_mse(mse, orig.max_value(), cap_db);
      }
    }
  }
  return grid;
}

}  // namespace serial

}  // namespace ofbvr
