#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ofbvr/qoe.hpp"

using namespace ofbvr;
using namespace ofbvr::test;

namespace {

Frame uniform_frame(int w, int h, std::uint8_t v) { return Frame(w, h, v); }

}  // namespace

TEST_CASE("visibility mask follows the sign rule") {
  Frame orig = uniform_frame(24, 12, 10);

  Frame enc2 = uniform_frame(24, 12, 12);   // |diff| = 2
  Frame enc5 = uniform_frame(24, 12, 15);   // |diff| = 5
  Frame enc3 = uniform_frame(24, 12, 13);   // |diff| = 3
  ScalarMap jnd(24, 12, 3.0);

  for (double v : visibility_mask(orig, enc2, jnd).cells) CHECK(v == 0.0);
  for (double v : visibility_mask(orig, enc5, jnd).cells) CHECK(v == 1.0);
  for (double v : visibility_mask(orig, enc3, jnd).cells) CHECK(v == 0.5);

  ScalarMap wrong(48, 12, 3.0);
  CHECK_THROWS_AS(visibility_mask(orig, enc2, wrong), InputError);
}

TEST_CASE("masked mse") {
  Frame orig = uniform_frame(96, 48, 100);
  ScalarMap zero(96, 48, 0.0);

  CHECK(mse_of(orig, orig, zero) == 0.0);

  Frame enc16 = uniform_frame(96, 48, 116);
  CHECK(mse_of(orig, enc16, zero) == doctest::Approx(256.0));

  Frame enc5 = uniform_frame(96, 48, 105);
  ScalarMap ten(96, 48, 10.0);
  CHECK(mse_of(orig, enc5, ten) == 0.0);
}

TEST_CASE("psnr-of frozen values") {
  Frame orig = uniform_frame(96, 48, 100);
  ScalarMap zero(96, 48, 0.0);

  CHECK(psnr_of(orig, orig, zero) == 100.0);  // cap at zero error

  Frame enc16 = uniform_frame(96, 48, 116);
  double expected = 20.0 * std::log10(255.0 / 16.0);
  double got = psnr_of(orig, enc16, zero);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got == doctest::Approx(24.0484).epsilon(1e-4));
}

TEST_CASE("psnr-of with zero thresholds reduces to plain psnr") {
  for (int i = 0; i < 20; ++i) {
    Frame a = noise_frame(96, 48, 100 + i);
    Frame b = noise_frame(96, 48, 200 + i);
    ScalarMap zero(96, 48, 0.0);
    CHECK(psnr_of(a, b, zero) ==
          doctest::Approx(reference_psnr(a, b, 100.0)).epsilon(1e-9));
  }
}

TEST_CASE("masking bound and monotone masking") {
  Rng rng(20);
  for (int i = 0; i < 20; ++i) {
    Frame a = noise_frame(96, 48, 300 + i);
    Frame b = noise_frame(96, 48, 400 + i);
    ScalarMap zero(96, 48, 0.0);
    ScalarMap jnd(96, 48, 0.0);
    for (auto& v : jnd.cells) v = rng.uniform(0, 60);

    double plain = psnr_of(a, b, zero);
    double masked = psnr_of(a, b, jnd);
    CHECK(masked >= plain);
    CHECK(masked <= 100.0);

    ScalarMap raised = jnd;
    raised.at(10, 10) += 50.0;
    CHECK(psnr_of(a, b, raised) >= masked);
  }
}

TEST_CASE("tile scores") {
  QualityLadder ladder = QualityLadder::standard();
  Frame orig = noise_frame(96, 48, 50);
  ScalarMap zero(96, 48, 0.0);

  std::vector<Frame> perfect(5, orig);
  TileScoreGrid grid = tile_scores(orig, perfect, zero, ladder);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 24; ++c) {
      CHECK(grid.score(r, c, 0) == 0.0);
      for (int l = 1; l < 6; ++l) CHECK(grid.score(r, c, l) == 100.0);
    }

  // distortion in one cell at the lowest level only
  std::vector<Frame> encs(5, orig);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      encs[0].at(y, x) = static_cast<std::uint8_t>(orig.at(y, x) ^ 0x7f);
  TileScoreGrid g2 = tile_scores(orig, encs, zero, ladder);
  CHECK(g2.score(0, 0, 1) < g2.score(0, 0, 5));
  CHECK(g2.score(0, 5, 1) == 100.0);

  std::vector<Frame> missing(4, orig);
  CHECK_THROWS_AS(tile_scores(orig, missing, zero, ladder), InputError);
}

TEST_CASE("parallel tile scores match the serial reference") {
  QualityLadder ladder = QualityLadder::standard();
  Frame orig = noise_frame(96, 48, 60);
  std::vector<Frame> encs;
  for (int l = 1; l <= 5; ++l) encs.push_back(synthetic_encode(orig, l));
  Rng rng(21);
  ScalarMap jnd(96, 48, 0.0);
  for (auto& v : jnd.cells) v = rng.uniform(0, 20);

  TileScoreGrid a = tile_scores(orig, encs, jnd, ladder);
  TileScoreGrid b = serial::tile_scores(orig, encs, jnd, ladder);
  for (std::size_t i = 0; i < a.scores.size(); ++i)
    CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-12));

  CHECK(mse_of(orig, encs[0], jnd) ==
        doctest::Approx(serial::mse_of(orig, encs[0], jnd)).epsilon(1e-12));
}

TEST_CASE("efficiency") {
  TileScoreGrid grid(12, 24, 6);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 24; ++c) {
      grid.score(r, c, 1) = 30.0;
      grid.score(r, c, 5) = 40.0;
    }
  Grid<double> e = efficiency(grid, 5, 1);
  for (double v : e.cells) CHECK(v == doctest::Approx(2.5));

  TileScoreGrid flat(12, 24, 6);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 24; ++c) {
      flat.score(r, c, 1) = 35.0;
      flat.score(r, c, 5) = 35.0;
    }
  for (double v : efficiency(flat, 5, 1).cells) CHECK(v == 0.0);

  CHECK_THROWS_AS(efficiency(grid, 1, 1), InputError);
  CHECK_THROWS_AS(efficiency(grid, 1, 5), InputError);
}

TEST_CASE("efficiency is linear in the score gap") {
  TileScoreGrid grid(12, 24, 6);
  Rng rng(22);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 24; ++c) {
      double lo = rng.uniform(20, 40);
      grid.score(r, c, 1) = lo;
      grid.score(r, c, 5) = lo + rng.uniform(0, 20);
    }
  Grid<double> e1 = efficiency(grid, 5, 1);
  TileScoreGrid scaled = grid;
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 24; ++c)
      scaled.score(r, c, 5) =
          grid.score(r, c, 1) + 3.0 * (grid.score(r, c, 5) - grid.score(r, c, 1));
  Grid<double> e3 = efficiency(scaled, 5, 1);
  for (std::size_t i = 0; i < e1.cells.size(); ++i)
    CHECK(e3.cells[i] == doctest::Approx(3.0 * e1.cells[i]).epsilon(1e-9));
}

TEST_CASE("synthetic encode distortion shrinks with the level") {
  Frame orig = noise_frame(96, 48, 70);
  ScalarMap zero(96, 48, 0.0);
  double prev = -1.0;
  for (int l = 1; l <= 5; ++l) {
    double p = psnr_of(orig, synthetic_encode(orig, l), zero);
    if (l > 1) CHECK(p >= prev);
    prev = p;
  }
  CHECK_THROWS_AS(synthetic_encode(orig, 0), InputError);
  CHECK_THROWS_AS(synthetic_encode(orig, 6), InputError);
}
