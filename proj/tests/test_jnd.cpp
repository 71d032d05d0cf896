#include "doctest.h"
#include "helpers.hpp"
#include "ofbvr/jnd.hpp"

using namespace ofbvr;
using namespace ofbvr::test;

TEST_CASE("sjnd values") {
  CHECK(sjnd(0.0) == 8.0);
  CHECK(sjnd(1.0) == doctest::Approx(10.047).epsilon(1e-12));
  CHECK(sjnd(8.0) == doctest::Approx(15.651).epsilon(1e-4));
  CHECK_THROWS_AS(sjnd(-0.1), InputError);
}

TEST_CASE("djnd values and branch continuity") {
  CHECK(djnd(0.0) == 12.0);
  CHECK(djnd(2.0) == 50.0);
  double below = 9.0 * 1.0 + 12.0;
  double above = 29.0 * 1.0 - 8.0;
  CHECK(std::abs(below - above) < 1e-12);
  CHECK(djnd(1.0) == 21.0);
  CHECK(djnd(1.0 - 1e-9) == doctest::Approx(21.0).epsilon(1e-7));
  CHECK_THROWS_AS(djnd(-1e-9), InputError);
}

TEST_CASE("joint jnd floor and scaling") {
  ScalarMap dv(24, 12, 0.0), dd(24, 12, 0.0);
  JndMap scaled = joint_jnd(dv, dd);  // default lambda 3/96
  for (double v : scaled.cells) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  JndMap raw = joint_jnd(dv, dd, JndConfig{1.0});
  for (double v : raw.cells) CHECK(v == doctest::Approx(96.0).epsilon(1e-12));
}

TEST_CASE("joint jnd product value") {
  ScalarMap dv(24, 12, 1.0), dd(24, 12, 1.0);
  JndMap m = joint_jnd(dv, dd, JndConfig{1.0});
  CHECK(m.at(0, 0) == doctest::Approx(210.987).epsilon(1e-4));
}

TEST_CASE("joint jnd is monotone in both factors") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    double dv = rng.uniform(0, 10), dd = rng.uniform(0, 3);
    double ddv = rng.uniform(0, 2), ddd = rng.uniform(0, 1);
    double base = sjnd(dv) * djnd(dd);
    CHECK(sjnd(dv + ddv) * djnd(dd) >= base);
    CHECK(sjnd(dv) * djnd(dd + ddd) >= base);
  }
}

TEST_CASE("joint jnd keeps the exact product structure") {
  Rng rng(8);
  ScalarMap dv(24, 12, 0.0), dd(24, 12, 0.0), zero(24, 12, 0.0);
  for (auto& v : dv.cells) v = rng.uniform(0, 12);
  for (auto& v : dd.cells) v = rng.uniform(0, 3);
  JndConfig cfg{1.0};
  JndMap both = joint_jnd(dv, dd, cfg);
  JndMap floor = joint_jnd(zero, zero, cfg);
  JndMap v_only = joint_jnd(dv, zero, cfg);
  JndMap d_only = joint_jnd(zero, dd, cfg);
  for (std::size_t i = 0; i < both.cells.size(); ++i) {
    double lhs = both.cells[i] * floor.cells[i];
    double rhs = v_only.cells[i] * d_only.cells[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("joint jnd floor invariant holds when a pixel is static and flat") {
  Rng rng(9);
  ScalarMap dv(24, 12, 0.0), dd(24, 12, 0.0);
  for (auto& v : dv.cells) v = rng.uniform(0, 5);
  for (auto& v : dd.cells) v = rng.uniform(0, 2);
  dv.at(4, 4) = 0.0;
  dd.at(4, 4) = 0.0;
  JndConfig cfg{3.0 / 96.0};
  JndMap m = joint_jnd(dv, dd, cfg);
  double lo = m.cells[0];
  for (double v : m.cells) lo = std::min(lo, v);
  CHECK(lo == doctest::Approx(cfg.lambda * 96.0).epsilon(1e-12));
}

TEST_CASE("joint jnd input checks and serial equivalence") {
  ScalarMap a(24, 12, 1.0), b(48, 12, 1.0);
  CHECK_THROWS_AS(joint_jnd(a, b), InputError);
  ScalarMap neg(24, 12, 1.0);
  neg.at(0, 0) = -1.0;
  CHECK_THROWS_AS(joint_jnd(neg, a), InputError);

  Rng rng(10);
  ScalarMap dv(24, 12, 0.0), dd(24, 12, 0.0);
  for (auto& v : dv.cells) v = rng.uniform(0, 12);
  for (auto& v : dd.cells) v = rng.uniform(0, 3);
  JndMap par = joint_jnd(dv, dd);
  JndMap ser = serial::joint_jnd(dv, dd);
  for (std::size_t i = 0; i < par.cells.size(); ++i)
    CHECK(par.cells[i] == ser.cells[i]);
}
