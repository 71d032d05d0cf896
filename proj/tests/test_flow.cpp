#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ofbvr/flow.hpp"

using namespace ofbvr;
using namespace ofbvr::test;

namespace {

void median_vector(const FlowField& flow, double& mx, double& my) {
  std::vector<double> xs, ys;
  xs.reserve(flow.cells.size());
  ys.reserve(flow.cells.size());
  for (const Vec2& v : flow.cells) {
    xs.push_back(v.dx);
    ys.push_back(v.dy);
  }
  mx = median(std::move(xs));
  my = median(std::move(ys));
}

}  // namespace

TEST_CASE("identical frames give zero flow") {
  Frame f = noise_frame(96, 48, 1);
  FlowField flow = estimate_flow(f, f, 8, 3);
  for (const Vec2& v : flow.cells) {
    CHECK(v.dx == 0.0);
    CHECK(v.dy == 0.0);
  }
}

TEST_CASE("integer shift with wrap padding is recovered by the median") {
  Frame prev = noise_frame(96, 48, 2);
  Frame next = shift_wrap(prev, 2, 0);
  FlowField flow = estimate_flow(prev, next, 8, 3);
  double mx, my;
  median_vector(flow, mx, my);
  CHECK(mx == 2.0);
  CHECK(my == 0.0);
}

TEST_CASE("translation consistency across shifts up to the radius") {
  Frame prev = noise_frame(96, 48, 3);
  for (int dx : {-3, -1, 0, 2, 3}) {
    for (int dy : {-3, 0, 1, 3}) {
      Frame next = shift_wrap(prev, dx, dy);
      FlowField flow = estimate_flow(prev, next, 16, 3);
      double mx, my;
      median_vector(flow, mx, my);
      CHECK(mx == static_cast<double>(dx));
      CHECK(my == static_cast<double>(dy));
    }
  }
}

TEST_CASE("fractional shift recovered within half a pixel") {
  Frame prev = pattern_frame(96, 48, 0.0, 0.0);
  Frame next = pattern_frame(96, 48, 1.5, -0.5);
  FlowField flow = estimate_flow(prev, next, 16, 3);
  double mx, my;
  median_vector(flow, mx, my);
  CHECK(std::abs(mx - 1.5) <= 0.5);
  CHECK(std::abs(my - (-0.5)) <= 0.5);
}

TEST_CASE("flow input validation") {
  Frame small(24, 12);
  Frame tall(24, 24);
  CHECK_THROWS_AS(estimate_flow(small, small, 32, 3), InputError);
  CHECK_THROWS_AS(estimate_flow(small, tall, 8, 3), InputError);
  CHECK_THROWS_AS(estimate_flow(small, small, 2, 3), InputError);
  CHECK_THROWS_AS(estimate_flow(small, small, 8, 0), InputError);
}

TEST_CASE("parallel flow matches the serial reference") {
  Frame prev = noise_frame(96, 48, 4);
  Frame next = shift_wrap(prev, -2, 1);
  FlowField a = estimate_flow(prev, next, 8, 3);
  FlowField b = serial::estimate_flow(prev, next, 8, 3);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i] == b.cells[i]);
}

TEST_CASE("relative velocity map") {
  FlowField flow(96, 48);
  for (Vec2& v : flow.cells) v = {3.0, 4.0};

  ScalarMap zero = relative_velocity_map(flow, Vec2{3.0, 4.0});
  for (double v : zero.cells) CHECK(v == 0.0);

  ScalarMap mag = relative_velocity_map(flow, Vec2{0.0, 0.0});
  for (double v : mag.cells) CHECK(v == doctest::Approx(5.0));

  FlowField one(96, 48);
  one.at(7, 11) = {1.0, 0.0};
  ScalarMap m = relative_velocity_map(one, Vec2{0.0, 1.0});
  CHECK(m.at(7, 11) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("relative velocity is symmetric under joint negation") {
  Rng rng(5);
  FlowField flow(48, 24);
  for (Vec2& v : flow.cells) v = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
  FlowField neg = flow;
  for (Vec2& v : neg.cells) {
    v.dx = -v.dx;
    v.dy = -v.dy;
  }
  Vec2 vel{1.5, -2.5};
  ScalarMap a = relative_velocity_map(flow, vel);
  ScalarMap b = relative_velocity_map(neg, Vec2{-vel.dx, -vel.dy});
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    CHECK(a.cells[i] == doctest::Approx(b.cells[i]).epsilon(1e-12));
}

TEST_CASE("depth proxy map") {
  FlowField zero(96, 48);
  ScalarMap all_zero = depth_proxy_map(zero);
  for (double v : all_zero.cells) CHECK(v == 0.0);

  FlowField two(96, 48);
  for (int c = 0; c < 48; ++c) two.at(3, c) = {2.0, 0.0};
  for (int c = 48; c < 96; ++c) two.at(3, c) = {4.0, 0.0};
  ScalarMap norm = depth_proxy_map(two, 0.5);
  CHECK(norm.at(3, 0) == doctest::Approx(0.5));
  CHECK(norm.at(3, 48) == doctest::Approx(1.0));
  CHECK(norm.at(0, 0) == 0.0);

  FlowField tiny(96, 48);
  for (Vec2& v : tiny.cells) v = {0.2, 0.1};
  ScalarMap bg = depth_proxy_map(tiny, 0.5);
  for (double v : bg.cells) CHECK(v == 0.0);
}

TEST_CASE("depth proxy is invariant under uniform scaling") {
  Rng rng(6);
  FlowField flow(48, 24);
  for (Vec2& v : flow.cells) {
    // keep magnitudes clear of the background threshold
    double ang = rng.uniform(0, 6.28);
    double mag = rng.uniform(1.0, 6.0);
    v = {mag * std::cos(ang), mag * std::sin(ang)};
  }
  FlowField scaled = flow;
  for (Vec2& v : scaled.cells) {
    v.dx *= 3.0;
    v.dy *= 3.0;
  }
  ScalarMap a = depth_proxy_map(flow, 0.5);
  ScalarMap b = depth_proxy_map(scaled, 0.5);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i] >= 0.0);
    CHECK(a.cells[i] <= 1.0);
    CHECK(a.cells[i] == doctest::Approx(b.cells[i]).epsilon(1e-12));
  }
}

TEST_CASE("relative depth map") {
  ScalarMap depth(96, 48, 0.2);
  ViewpointSample vp{};  // center
  int row, col;
  project_viewpoint(vp.yaw, vp.pitch, 96, 48, row, col);
  depth.at(row, col) = 0.9;

  ScalarMap uniform(96, 48, 0.4);
  ScalarMap flat = relative_depth_map(uniform, vp);
  for (double v : flat.cells) CHECK(v == 0.0);

  ScalarMap rel = relative_depth_map(depth, vp);
  CHECK(rel.at(row, col) == 0.0);
  CHECK(rel.at(0, 0) == doctest::Approx(0.7));

  ScalarMap fg(96, 48, 1.0);
  fg.at(row, col) = 0.0;  // viewer on background
  ScalarMap rel2 = relative_depth_map(fg, vp);
  CHECK(rel2.at(5, 5) == doctest::Approx(1.0));
  for (double v : rel2.cells) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  ViewpointSample bad{0.0, 200.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(relative_depth_map(depth, bad), InputError);
}
