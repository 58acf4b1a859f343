#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "doorstep/flight.hpp"
#include "doorstep/io.hpp"
#include "doorstep/sensors.hpp"
#include "scenes.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace doorstep;

namespace {

constexpr double kPi = std::numbers::pi;

std::string dump(const WorldModel& w) {
  std::ostringstream out;
  write_world_json(out, w);
  return out.str();
}

GeneratorParams params(std::uint64_t seed, DoorVisibility mode = DoorVisibility::Open) {
  GeneratorParams p;
  p.seed = seed;
  p.door_mode = mode;
  return p;
}

bool touches_edge(const Polygon& poly, const Vec2& size) {
  for (const Vec2& v : poly) {
    if (v.x() <= 1e-9 || v.y() <= 1e-9 || v.x() >= size.x() - 1e-9 || v.y() >= size.y() - 1e-9) return true;
  }
  return false;
}

bool free_point(const WorldModel& w, const Vec2& p) {
  const ClassLabel c = w.class_at(p);
  return c == ClassLabel::Grass || c == ClassLabel::PavedArea;
}

}  // namespace

TEST_CASE("same seed, same world") {
  CHECK(dump(generate_world(params(7))) == dump(generate_world(params(7))));
  CHECK(dump(generate_world(params(7))) != dump(generate_world(params(8))));
}

TEST_CASE("neighbor count sets the number of roofs") {
  for (int n = 0; n <= 2; ++n) {
    GeneratorParams p = params(3);
    p.neighbor_count = n;
    const WorldModel w = generate_world(p);
    CHECK(w.houses.size() == static_cast<std::size_t>(n + 1));
    int recipients = 0;
    for (const House& h : w.houses) recipients += h.recipient ? 1 : 0;
    CHECK(recipients == 1);
    CHECK(w.houses.front().recipient);
  }
}

TEST_CASE("generator params are validated") {
  GeneratorParams p;
  p.obstacle_density = 1.5;
  CHECK_THROWS_AS(generate_world(p), std::invalid_argument);
  p = GeneratorParams{};
  p.house_width_min = p.house_width_max;
  CHECK_THROWS_AS(generate_world(p), std::invalid_argument);
  p = GeneratorParams{};
  p.neighbor_count = 3;
  CHECK_THROWS_AS(generate_world(p), std::invalid_argument);
}

TEST_CASE("100 generated worlds satisfy the world invariants") {
  const DoorVisibility modes[] = {DoorVisibility::Open, DoorVisibility::Recessed, DoorVisibility::Enclosed};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const WorldModel w = generate_world(params(seed, modes[seed % 3]));
    CAPTURE(seed);
    CHECK_NOTHROW(w.check_invariants());
    // Paved ground connects the recipient to the map edge.
    bool at_house = false, at_edge = false;
    for (const Polygon& poly : w.front_paved) {
      at_edge |= touches_edge(poly, w.size);
      for (const Vec2& v : poly) at_house |= distance_to_polygon(v, w.recipient().footprint) < 1e-6;
    }
    CHECK(at_house);
    CHECK(at_edge);
    // Door on the recipient wall, facing the front.
    CHECK(distance_to_polygon(w.door.center, w.recipient().footprint) < 1e-6);
    CHECK(w.door.normal.norm() == doctest::Approx(1.0));
    CHECK(w.door.normal.dot(w.front_direction) > 0.99);
    CHECK(w.door.visibility == modes[seed % 3]);
    CHECK(w.start.altitude >= 20.0);
    CHECK(w.start.altitude <= 30.0);
  }
}

TEST_CASE("GPS start scatters around the house center with the configured sigma") {
  double sum2 = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    GeneratorParams p = params(1000 + i);
    p.gps_offset_sigma = 2.0;
    const WorldModel w = generate_world(p);
    sum2 += (w.start.xy() - w.recipient_center()).squaredNorm();
  }
  // E|offset|^2 = 2 sigma^2 = 8.
  CHECK(sum2 / n == doctest::Approx(8.0).epsilon(0.2));
  GeneratorParams exact = params(5);
  exact.gps_offset_sigma = 0.0;
  const WorldModel w = generate_world(exact);
  CHECK((w.start.xy() - w.recipient_center()).norm() < 1e-9);
}

TEST_CASE("an open door is visible from most of the front yard") {
  for (std::uint64_t seed : {2u, 11u, 23u, 42u}) {
    const WorldModel w = generate_world(params(seed));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, w.size.x()), uy(0.0, w.size.y());
    int tried = 0, seen = 0;
    while (tried < 400) {
      const Vec2 p(ux(rng), uy(rng));
      // In front of the facade, inside the recipient's lot.
      const Vec2 d = p - w.door.center;
      if (d.dot(w.door.normal) < 0.5 || d.norm() > 12.0 || !free_point(w, p)) continue;
      if (std::abs(d.dot(Vec2(-w.door.normal.y(), w.door.normal.x()))) > 6.0) continue;
      ++tried;
      seen += line_of_sight(w, p, w.door.center + 0.05 * w.door.normal) ? 1 : 0;
    }
    CAPTURE(seed);
    CHECK(seen >= 0.9 * tried);
  }
}

TEST_CASE("an enclosed door is never detected") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const WorldModel w = generate_world(params(seed, DoorVisibility::Enclosed));
    const Box house = bounding_box(w.recipient().footprint);  // the screened alcove is inside
    for (double a = -kPi; a < kPi; a += kPi / 24) {
      for (double r = 0.6; r <= 8.0; r += 0.2) {
        const Vec2 p = w.door.center + r * Vec2(std::cos(a), std::sin(a));
        if (!w.in_bounds(p) || !free_point(w, p) || house.contains(p)) continue;
        const DronePose pose{p.x(), p.y(), 2.0, heading_to(p, w.door.center)};
        CHECK_FALSE(detect_door(w, pose, DetectorParams{}).has_value());
      }
    }
  }
}

TEST_CASE("the nadir pixel shows the ground under the drone") {
  const WorldModel w = scenes::plain_house();
  const CameraModel cam{};
  const SemanticGrid over_road = render_aerial(w, DronePose{10.0, 1.5, 20.0, 0.0}, cam);
  CHECK(over_road.at(over_road.drone_pixel()) == ClassLabel::PavedArea);
  const SemanticGrid over_roof = render_aerial(w, DronePose{20.0, 16.0, 20.0, 1.0}, cam);
  CHECK(over_roof.at(over_roof.drone_pixel()) == ClassLabel::Roof);
  CHECK(over_roof.resolution() == doctest::Approx(0.2));
  CHECK_THROWS_AS(render_aerial(w, DronePose{20.0, 16.0, 0.0, 0.0}, cam), std::invalid_argument);
}

TEST_CASE("doubling the altitude quarters the roof area in pixels") {
  const WorldModel w = scenes::plain_house();
  const CameraModel cam{};
  const auto low = render_aerial(w, DronePose{20.0, 16.0, 10.0, 0.0}, cam).count(ClassLabel::Roof);
  const auto high = render_aerial(w, DronePose{20.0, 16.0, 20.0, 0.0}, cam).count(ClassLabel::Roof);
  CHECK(static_cast<double>(low) / static_cast<double>(high) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("off-world capture is all Unknown") {
  const WorldModel w = scenes::plain_house();
  const SemanticGrid g = render_aerial(w, DronePose{500.0, -300.0, 20.0, 0.0}, CameraModel{});
  CHECK(g.count(ClassLabel::Unknown) == static_cast<std::size_t>(g.width()) * g.height());
}

TEST_CASE("rendered labels agree with the world at back-projected points") {
  const WorldModel w = generate_world(params(17));
  const CameraModel cam{};
  const SemanticGrid g = render_aerial(w, w.start, cam);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> uc(0, g.width() - 1), ur(0, g.height() - 1);
  for (int i = 0; i < 1000; ++i) {
    const int c = uc(rng), r = ur(rng);
    const Vec2 ground = w.start.xy() + pixel_to_ground_offset(Vec2(c, r), cam, w.start.altitude);
    CHECK(g.at(c, r) == w.class_at(ground));
  }
}

TEST_CASE("range finder reads the altitude") {
  const WorldModel w = scenes::plain_house();
  CHECK(range_find(w, DronePose{1, 1, 25.0, 0}) == 25.0);
  CHECK(range_find(w, DronePose{1, 1, 2.0, 0}) == 2.0);
  CHECK(range_find(w, DronePose{1, 1, 0.0, 0}) == 0.0);
}

TEST_CASE("door detector: frontal view, occlusion, range and incidence") {
  WorldModel w = scenes::plain_house();
  const DetectorParams dp{};
  const auto det = detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp);
  REQUIRE(det.has_value());
  CHECK(det->door_point.isApprox(w.door.center));
  CHECK(det->wall_normal.isApprox(w.door.normal));
  CHECK(det->source_pose.y == 9.0);
  // Facing away.
  CHECK_FALSE(detect_door(w, DronePose{20.0, 9.0, 2.0, -kPi / 2}, dp));
  // Range bound.
  CHECK(detect_door(w, DronePose{20.0, 12.0 - dp.max_range + 1e-6, 2.0, kPi / 2}, dp));
  CHECK_FALSE(detect_door(w, DronePose{20.0, 12.0 - dp.max_range - 1e-6, 2.0, kPi / 2}, dp));
  // Grazing view along the wall.
  const Vec2 graze(14.0, 11.5);
  CHECK_FALSE(detect_door(w, DronePose{graze.x(), graze.y(), 2.0, heading_to(graze, w.door.center)}, dp));
  // From behind the wall.
  CHECK_FALSE(detect_door(w, DronePose{20.0, 14.0, 2.0, -kPi / 2}, dp));
  // Hedge in between.
  w.regions.push_back({ClassLabel::Vegetation, rectangle(18.0, 10.0, 22.0, 10.5)});
  CHECK_FALSE(detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp));
}

TEST_CASE("detector misses are seeded") {
  const WorldModel w = scenes::plain_house();
  DetectorParams dp;
  dp.miss_probability = 1.0;
  std::mt19937_64 rng(1);
  CHECK_FALSE(detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp, &rng));
  CHECK_THROWS_AS(detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp), std::invalid_argument);
  dp.miss_probability = 0.5;
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    CHECK(detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp, &a).has_value() ==
          detect_door(w, DronePose{20.0, 9.0, 2.0, kPi / 2}, dp, &b).has_value());
  }
}

TEST_CASE("local scan: empty, a car ahead, and a car hidden by the house") {
  WorldModel w = scenes::plain_house();
  const GridFrame f{Vec2::Zero(), 0.25, 160, 160};
  const DronePose pose{8.0, 8.0, 2.0, 0.0};
  CHECK(local_obstacle_scan(w, pose, f, 5.0).empty());

  const Polygon car = rectangle(10.0, 7.0, 12.0, 9.0);
  w.regions.push_back({ClassLabel::Car, car});
  const auto cells = local_obstacle_scan(w, pose, f, 5.0);
  REQUIRE_FALSE(cells.empty());
  // Ray-cast reference: the first blocked sample along the ray to the car's near face.
  const std::set<std::pair<int, int>> got = [&] {
    std::set<std::pair<int, int>> s;
    for (const Cell& c : cells) s.insert({c.x(), c.y()});
    return s;
  }();
  for (double y = 7.25; y <= 8.75; y += 0.25) {
    const Vec2 dir = (Vec2(10.05, y) - pose.xy()).normalized();
    Vec2 hit = pose.xy();
    for (double s = 0.125; s <= 5.0; s += 0.125) {
      hit = pose.xy() + s * dir;
      if (is_clearance_source(w.class_at(hit))) break;
    }
    const Cell c = f.cell_of(hit);
    CHECK(got.count({c.x(), c.y()}) == 1);
  }
  // Every reported cell is on or near the car.
  for (const Cell& c : cells) CHECK(distance_to_polygon(f.center(c), car) < 0.25);
  // The hidden car behind the house is not reported.
  w.regions.push_back({ClassLabel::Car, rectangle(26.5, 17.0, 27.5, 19.0)});
  const DronePose west{13.0, 18.0, 2.0, 0.0};
  for (const Cell& c : local_obstacle_scan(w, west, f, 16.0)) CHECK(f.center(c).x() < 26.0);
}

TEST_CASE("sensors are deterministic") {
  const WorldModel w = generate_world(params(31));
  const GridFrame f{Vec2::Zero(), 0.25, 240, 240};
  const auto a = local_obstacle_scan(w, w.start, f, 6.0);
  const auto b = local_obstacle_scan(w, w.start, f, 6.0);
  CHECK(a == b);
  CHECK(render_aerial(w, w.start, CameraModel{}) == render_aerial(w, w.start, CameraModel{}));
}

TEST_CASE("step kinematics") {
  const DronePose p{1.0, 2.0, 3.0, 0.5};
  const DronePose fast = step_drone(p, VelocityCommand{Vec3(1.0, 0.0, 0.0), 0.0}, 0.1);
  CHECK(fast.x - p.x == doctest::Approx(0.05));
  CHECK(step_drone(p, VelocityCommand{}, 0.1) == p);
  const DronePose wrap = step_drone(DronePose{0, 0, 1, kPi}, VelocityCommand{Vec3::Zero(), kPi / 0.1}, 0.1);
  CHECK(wrap.yaw > -kPi);
  CHECK(wrap.yaw <= kPi);
  CHECK(std::abs(wrap.yaw) < 1e-12);
  const DronePose down = step_drone(DronePose{0, 0, 0.01, 0}, VelocityCommand{Vec3(0, 0, -0.5), 0}, 0.1);
  CHECK(down.altitude == 0.0);
  CHECK_THROWS_AS(step_drone(p, VelocityCommand{}, 0.0), std::invalid_argument);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const DronePose q = step_drone(p, VelocityCommand{Vec3(n(rng), n(rng), n(rng)), n(rng)}, 0.1);
    CHECK((q.xyz() - p.xyz()).norm() <= 0.05 + 1e-12);
  }
}

TEST_CASE("flight clock and trajectory") {
  Flight f(DronePose{0.0, 0.0, 2.0, 0.0});
  int ticks = 0;
  while (!f.step_toward(Vec3(3.0, 4.0, 2.0))) ++ticks;
  CHECK(f.pose().xy() == Vec2(3.0, 4.0));
  CHECK(f.ticks() == 100);  // 5 m at 0.05 m per tick
  CHECK(f.time() == doctest::Approx(10.0));
  CHECK(f.path_length() == doctest::Approx(5.0));
  for (std::size_t i = 1; i < f.trajectory().size(); ++i) {
    const auto& a = f.trajectory()[i - 1];
    const auto& b = f.trajectory()[i];
    CHECK((b.pose.xyz() - a.pose.xyz()).norm() <= 0.05 + 1e-12);
    CHECK(b.t - a.t == doctest::Approx(0.1));
  }
  while (!f.turn_toward(kPi / 2)) {
  }
  CHECK(f.pose().yaw == doctest::Approx(kPi / 2));
  CHECK(f.pose().xy() == Vec2(3.0, 4.0));
}

TEST_CASE("world JSON round trip") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const WorldModel w = generate_world(params(seed, DoorVisibility::Recessed));
    std::stringstream ss;
    write_world_json(ss, w);
    const WorldModel back = read_world_json(ss);
    CHECK(dump(back) == dump(w));
    CHECK(back.door.visibility == DoorVisibility::Recessed);
    CHECK(back.houses.size() == w.houses.size());
    CHECK(back.start == w.start);
  }
  std::istringstream wrong(R"({"schema": "doorstep.world/0"})");
  CHECK_THROWS_AS(read_world_json(wrong), std::runtime_error);
  std::istringstream garbage("not json");
  CHECK_THROWS_AS(read_world_json(garbage), std::runtime_error);
  CHECK_THROWS_AS(load_world("/nonexistent/dir/world.json"), std::runtime_error);
}
