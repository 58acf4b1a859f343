#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "doorstep/descent.hpp"
#include "doorstep/sensors.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

#include <random>

using namespace doorstep;

namespace {

Segment seg_at(const Vec2& centroid, std::vector<Cell> pixels = {}, bool border = false) {
  Segment s;
  s.label = ClassLabel::Roof;
  s.centroid = centroid;
  s.pixels = pixels.empty() ? std::vector<Cell>{centroid.cast<int>()} : std::move(pixels);
  s.touches_image_boundary = border;
  return s;
}

std::vector<Cell> block(int c0, int r0, int c1, int r1) {
  std::vector<Cell> out;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) out.emplace_back(c, r);
  return out;
}

// Straight road with fenced edges, walkway lined by hedges: no paved point
// is 2.5 m from every roof / obstacle.
WorldModel cramped_house() {
  WorldModel w = scenes::plain_house();
  w.regions.clear();
  w.regions.push_back({ClassLabel::Fence, rectangle(0.0, 0.0, 40.0, 0.4)});
  w.regions.push_back({ClassLabel::Fence, rectangle(0.0, 3.6, 19.0, 4.0)});
  w.regions.push_back({ClassLabel::Fence, rectangle(21.0, 3.6, 40.0, 4.0)});
  w.regions.push_back({ClassLabel::PavedArea, rectangle(0.0, 0.4, 40.0, 3.6)});
  w.regions.push_back({ClassLabel::PavedArea, rectangle(19.0, 3.6, 21.0, 12.0)});
  w.regions.push_back({ClassLabel::Vegetation, rectangle(18.0, 4.0, 19.0, 12.0)});
  w.regions.push_back({ClassLabel::Vegetation, rectangle(21.0, 4.0, 22.0, 12.0)});
  w.front_paved = {rectangle(0.0, 0.4, 40.0, 3.6), rectangle(19.0, 3.6, 21.0, 12.0)};
  return w;
}

}  // namespace

TEST_CASE("roof selection picks the nearest centroid") {
  const std::vector<Segment> roofs{seg_at(Vec2(10, 10)), seg_at(Vec2(50, 50))};
  CHECK(identify_recipient_roof(roofs, Vec2(32, 32)) == 1);
  CHECK(identify_recipient_roof({seg_at(Vec2(3, 4))}, Vec2(90, 90)) == 0);
  const std::vector<Segment> tie{seg_at(Vec2(20, 32)), seg_at(Vec2(44, 32))};
  CHECK(identify_recipient_roof(tie, Vec2(32, 32)) == 0);
  try {
    identify_recipient_roof({}, Vec2(0, 0));
    FAIL("expected an error");
  } catch (const DescentError& e) {
    CHECK(e.status() == DescentStatus::NoRoofVisible);
  }
}

TEST_CASE("roof selection is translation invariant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<Segment> roofs, moved;
    const Vec2 shift(u(rng) - 100, u(rng) - 100);
    for (int i = 0; i < 4; ++i) {
      const Vec2 c(u(rng), u(rng));
      roofs.push_back(seg_at(c));
      moved.push_back(seg_at(c + shift));
    }
    const Vec2 p(u(rng), u(rng));
    CHECK(identify_recipient_roof(roofs, p) == identify_recipient_roof(moved, p + shift));
  }
}

TEST_CASE("house orientation from the paved segment") {
  const Segment roof = seg_at(Vec2(40, 30), block(30, 20, 50, 40));
  Segment paved = seg_at(Vec2(40, 70), block(38, 41, 42, 79), true);
  paved.label = ClassLabel::PavedArea;
  paved.centroid = Vec2(40, 70);
  const HouseOrientation o = estimate_house_orientation(roof, {paved});
  CHECK(o.v_front.isApprox(Vec2(0, -40)));
  CHECK(o.paved_index == 0);

  // Two qualifying segments: the larger wins.
  std::vector<Cell> small = block(51, 30, 55, 129);   // 500 pixels, touches roof at column 51
  std::vector<Cell> large = block(20, 41, 31, 140);   // 1200 pixels, below-left corner
  Segment a = seg_at(Vec2(53, 80), small, true);
  Segment b = seg_at(Vec2(25, 90), large, true);
  REQUIRE(a.area() == 500);
  REQUIRE(b.area() == 1200);
  CHECK(estimate_house_orientation(roof, {a, b}).paved_index == 1);

  // Adjacent but interior: excluded.
  Segment interior = seg_at(Vec2(40, 45), block(35, 41, 45, 50), false);
  try {
    estimate_house_orientation(roof, {interior});
    FAIL("expected an error");
  } catch (const DescentError& e) {
    CHECK(e.status() == DescentStatus::NoFrontPavedArea);
  }
}

TEST_CASE("descent region rule") {
  CHECK(select_descent_region(DeliveryTarget::FrontDoor) == DescentRegion::FrontPavedArea);
  CHECK(select_descent_region(DeliveryTarget::FrontPavedArea) == DescentRegion::FrontPavedArea);
  CHECK(select_descent_region(DeliveryTarget::BackYard) == DescentRegion::BackYard);
  CHECK(select_descent_region(DeliveryTarget::FrontYard) == DescentRegion::FrontYard);
  CHECK(delivery_target_from_string("back_yard") == DeliveryTarget::BackYard);
  CHECK_THROWS(delivery_target_from_string("roof"));
}

TEST_CASE("motion direction") {
  CHECK(motion_direction<double>(Vec2(50, 50), Vec2(50, 80)).isApprox(Vec2(0, 1)));
  CHECK(motion_direction<double>(Vec2(0, 0), Vec2(3, 4)).isApprox(Vec2(0.6, 0.8)));
  CHECK_THROWS_AS(motion_direction<double>(Vec2(1, 1), Vec2(1, 1)), ZeroDisplacement);
  const Eigen::Vector2f f = motion_direction<float>(Eigen::Vector2f(0, 0), Eigen::Vector2f(0, 2));
  CHECK(f.y() == doctest::Approx(1.0f));
}

TEST_CASE("over-region test on the center pixel") {
  SemanticGrid g(11, 11, 0.1, ClassLabel::Grass);
  FrontBackMask m = classify_grass_front_back(g, Vec2(5, 0), Vec2(0, 1));  // center is in front
  g.set(5, 5, ClassLabel::PavedArea);
  CHECK(is_over_descent_region(g, classify_grass_front_back(g, Vec2(5, 0), Vec2(0, 1)), DescentRegion::FrontPavedArea));
  g.set(5, 5, ClassLabel::Grass);
  CHECK(m.at(5, 5) == Side::Front);
  CHECK_FALSE(is_over_descent_region(g, m, DescentRegion::BackYard));
  CHECK(is_over_descent_region(g, m, DescentRegion::FrontYard));
  g.set(5, 5, ClassLabel::Roof);
  m = classify_grass_front_back(g, Vec2(5, 0), Vec2(0, 1));
  for (auto r : {DescentRegion::FrontPavedArea, DescentRegion::BackYard, DescentRegion::FrontYard}) {
    CHECK_FALSE(is_over_descent_region(g, m, r));
  }
}

TEST_CASE("back-projection") {
  CameraModel cam{100, 100, 64, 64, 128, 128};
  CHECK(backproject<double>(Vec2(64, 64), cam, 10.0).isApprox(Vec3(0, 0, 10)));
  CHECK(backproject<double>(Vec2(114, 64), cam, 10.0).isApprox(Vec3(5, 0, 10)));
  const Vec3 a = backproject<double>(Vec2(20, 100), cam, 7.0);
  const Vec3 b = backproject<double>(Vec2(20, 100), cam, 14.0);
  CHECK(b.x() == 2 * a.x());
  CHECK(b.y() == 2 * a.y());
  CHECK_THROWS(backproject<double>(Vec2(1, 1), cam, 0.0));
  CHECK_THROWS(backproject<double>(Vec2(1, 1), cam, -1.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    CameraModel c{50 + 400 * u(rng), 50 + 400 * u(rng), 0, 0, 640, 480};
    c.cx = 640 * u(rng);
    c.cy = 480 * u(rng);
    const Vec2 px(640 * u(rng), 480 * u(rng));
    const double h = 0.5 + 50 * u(rng);
    CHECK((project<double>(backproject<double>(px, c, h), c) - px).norm() < 1e-9);
  }
}

TEST_CASE("safe spot: open paved expanse returns the drone pixel") {
  const CameraModel cam = CameraModel::centered(200, 200, 100.0);
  SemanticGrid g(200, 200, 0.2, ClassLabel::PavedArea);  // 40 m across at h = 20
  FrontBackMask m = classify_grass_front_back(g, Vec2(0, 0), Vec2(1, 0));
  const auto spot = find_safe_descent_point(g, m, DescentRegion::FrontPavedArea, cam, 20.0);
  REQUIRE(spot);
  CHECK(*spot == g.drone_pixel());
}

TEST_CASE("safe spot: a car 2 m away pushes the spot out") {
  const CameraModel cam = CameraModel::centered(100, 100, 100.0);
  SemanticGrid g(100, 100, 0.1, ClassLabel::PavedArea);  // h = 10: 0.1 m per pixel
  // Car column 20 pixels (2.0 m) to the right of the drone.
  for (int r = 0; r < 100; ++r) g.set(70, r, ClassLabel::Car);
  const FrontBackMask m = classify_grass_front_back(g, Vec2(0, 0), Vec2(1, 0));
  const auto spot = find_safe_descent_point(g, m, DescentRegion::FrontPavedArea, cam, 10.0);
  REQUIRE(spot);
  CHECK(*spot == Cell(45, 50));  // 25 pixels = 2.5 m from the car
}

TEST_CASE("safe spot: single valid pixel and no valid pixel") {
  const CameraModel cam = CameraModel::centered(41, 41, 10.0);
  SemanticGrid g(41, 41, 1.0, ClassLabel::Tree);
  ByteRaster allowed = ByteRaster::Zero(41, 41);
  // A 7x7 clearing; only its center is 3+ pixels (3 m at h = 10) from every tree.
  for (int r = 27; r <= 33; ++r)
    for (int c = 5; c <= 11; ++c) {
      g.set(c, r, ClassLabel::Grass);
      allowed(r, c) = 1;
    }
  const auto spot = find_safe_descent_point(g, allowed, cam, 10.0, 3.9);
  REQUIRE(spot);
  CHECK(*spot == Cell(8, 30));
  const auto brute = oracle::safe_spot(g, allowed, 1.0, 1.0, 3.9);
  REQUIRE(brute.ties.size() == 1);
  CHECK(brute.ties[0] == Cell(8, 30));
  CHECK_FALSE(find_safe_descent_point(g, allowed, cam, 10.0, 4.1));
}

TEST_CASE("safe spot matches the brute-force scan on random maps") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const int w = 20 + static_cast<int>(rng() % 30), h = 20 + static_cast<int>(rng() % 30);
    CameraModel cam = CameraModel::centered(w, h, 20.0);
    cam.fy = 20.0 + static_cast<double>(rng() % 10);
    SemanticGrid g(w, h, 1.0, ClassLabel::Grass);
    ByteRaster allowed = ByteRaster::Zero(h, w);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const auto k = rng() % 40;
        if (k == 0) g.set(c, r, ClassLabel::Tree);
        else if (k == 1) g.set(c, r, ClassLabel::Roof);
        else allowed(r, c) = rng() % 3 != 0;
      }
    const double hgt = 10.0;
    const double clearance = 1.0 + (rng() % 30) / 10.0;
    const auto got = find_safe_descent_point(g, allowed, cam, hgt, clearance);
    const auto want = oracle::safe_spot(g, allowed, hgt / cam.fx, hgt / cam.fy, clearance);
    REQUIRE(got.has_value() == !want.ties.empty());
    if (got) CHECK(std::find(want.ties.begin(), want.ties.end(), *got) != want.ties.end());
  }
}

TEST_CASE("run_descent straight down over a safe paved spot") {
  WorldModel w = scenes::plain_house();
  w.start = DronePose{30.0, 1.5, 25.0, 0.0};
  Flight f(w.start);
  const auto out = run_descent(f, w, DeliveryTarget::FrontPavedArea, CameraModel{});
  REQUIRE(out.status == DescentStatus::Success);
  CHECK(out.descent_point.isApprox(Vec2(30.0, 1.5)));
  for (const auto& tp : out.trajectory) CHECK((tp.pose.xy() - Vec2(30.0, 1.5)).norm() < 1e-9);
  CHECK(out.final_altitude == doctest::Approx(2.0));
}

TEST_CASE("run_descent to the back yard of generated houses") {
  for (std::uint64_t seed : {3u, 8u, 13u}) {
    GeneratorParams p;
    p.seed = seed;
    const WorldModel w = generate_world(p);
    Flight f(w.start);
    const auto out = run_descent(f, w, DeliveryTarget::BackYard, CameraModel{});
    REQUIRE(out.status == DescentStatus::Success);
    CHECK(contains(w.back_yard, out.descent_point));
    CHECK(w.class_at(out.descent_point) == ClassLabel::Grass);
    CHECK(w.clearance_at(out.descent_point) >= 2.5);
    CHECK(out.final_altitude == doctest::Approx(2.0));
    Flight g(w.start);
    const auto again = run_descent(g, w, DeliveryTarget::BackYard, CameraModel{});
    REQUIRE(again.trajectory.size() == out.trajectory.size());
    for (std::size_t i = 0; i < out.trajectory.size(); ++i) CHECK(again.trajectory[i].pose == out.trajectory[i].pose);
  }
}

TEST_CASE("run_descent reports NoSafeSpot on a cramped lot") {
  WorldModel w = cramped_house();
  w.start = DronePose{20.0, 13.0, 12.0, 0.0};  // road crosses the whole image
  Flight f(w.start);
  const auto out = run_descent(f, w, DeliveryTarget::FrontDoor, CameraModel{});
  CHECK(out.status == DescentStatus::NoSafeSpot);
}

TEST_CASE("run_descent flags a neighbor's roof") {
  WorldModel w = scenes::plain_house();
  w.houses.push_back({rectangle(27.0, 12.0, 35.0, 20.0), false});
  w.regions.push_back({ClassLabel::PavedArea, rectangle(30.0, 3.0, 32.0, 12.0)});
  w.start = DronePose{31.0, 16.0, 30.0, 0.0};
  Flight f(w.start);
  CHECK(run_descent(f, w, DeliveryTarget::FrontDoor, CameraModel{}).status == DescentStatus::WrongRoof);
}
