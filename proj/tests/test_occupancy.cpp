#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "doorstep/distance_transform.hpp"
#include "doorstep/occupancy.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace doorstep;

namespace {

OccupancyGrid free_grid(int w, int h, double res, Vec2 origin = Vec2::Zero()) {
  OccupancyGrid g;
  g.frame = GridFrame{origin, res, w, h};
  g.occupied = ByteRaster::Zero(h, w);
  return g;
}

void fill(OccupancyGrid& g, int c0, int r0, int c1, int r1) {
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) g.occupied(r, c) = 1;
}

Segment roof_block(OccupancyGrid& g, int c0, int r0, int c1, int r1) {
  Segment s;
  s.label = ClassLabel::Roof;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) s.pixels.emplace_back(c, r);
  fill(g, c0, r0, c1, r1);
  return s;
}

// Distance in meters from a point to the nearest roof cell center.
double to_roof(const OccupancyGrid& g, const Segment& roof, const Vec2& p) {
  double best = 1e300;
  for (const Cell& c : roof.pixels) best = std::min(best, (g.frame.center(c) - p).norm());
  return best;
}

bool near_occupied(const OccupancyGrid& g, const Vec2& p, double radius) {
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      if (g.occupied(r, c) && (g.frame.center(Cell(c, r)) - p).norm() <= radius - 1e-9) return true;
  return false;
}

}  // namespace

TEST_CASE("all-grass capture gives an all-free map") {
  const SemanticGrid grid(64, 48, 0.1, ClassLabel::Grass);
  const auto occ = build_occupancy(grid, CameraModel::centered(64, 48, 200.0), 20.0);
  CHECK(occ.width() == 64);
  CHECK(occ.height() == 48);
  CHECK((occ.occupied == 0).all());
}

TEST_CASE("resolution follows the capture height") {
  const SemanticGrid grid(10, 10, 0.1);
  CHECK(build_occupancy(grid, CameraModel::centered(10, 10, 200.0), 20.0).frame.resolution == doctest::Approx(0.1));
  CHECK(build_occupancy(grid, CameraModel::centered(10, 10, 100.0), 25.0).frame.resolution == doctest::Approx(0.25));
  CHECK_THROWS_AS(build_occupancy(grid, CameraModel::centered(10, 10, 100.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_occupancy(grid, CameraModel::centered(10, 10, 100.0), -3.0), std::invalid_argument);
}

TEST_CASE("roof and obstacles are occupied, paved and grass free") {
  SemanticGrid grid(kClassCount, 1, 0.1);
  for (int i = 0; i < kClassCount; ++i) grid.set(i, 0, static_cast<ClassLabel>(i));
  const auto occ = build_occupancy(grid, CameraModel::centered(kClassCount, 1, 100.0), 10.0);
  for (int i = 0; i < kClassCount; ++i) {
    const auto l = static_cast<ClassLabel>(i);
    const bool free = l == ClassLabel::PavedArea || l == ClassLabel::Grass;
    CAPTURE(label_name(l));
    CHECK(occ.is_occupied(Cell(i, 0)) == !free);
  }
}

TEST_CASE("the map registers with the world through the capture pose") {
  const CameraModel cam = CameraModel::centered(200, 200, 100.0);
  const SemanticGrid grid(200, 200, 0.25);
  const Vec2 capture(31.5, 17.25);
  const auto occ = build_occupancy(grid, cam, 25.0, capture);
  const Vec2 nadir = occ.frame.center(Cell(100, 100));
  CHECK(nadir.x() == doctest::Approx(capture.x()));
  CHECK(nadir.y() == doctest::Approx(capture.y()));
  const Vec2 corner = occ.frame.center(Cell(0, 0));
  CHECK(corner.x() == doctest::Approx(capture.x() - 25.0));
  CHECK(corner.y() == doctest::Approx(capture.y() - 25.0));
}

TEST_CASE("ring around an isolated roof") {
  // 0.1 m cells, 4 x 3 m roof; the offset outline at 1 m is P + 2*pi (rounded)
  // up to P + 8 (square corners).
  auto g = free_grid(120, 110, 0.1);
  const Segment roof = roof_block(g, 40, 40, 79, 69);
  const Path ring = extract_footprint_ring(g, roof, 1.0, 0.5);
  REQUIRE(ring.waypoints.size() > 10);
  const double perimeter = 2 * (4.0 + 3.0);
  CHECK(ring.total_length >= perimeter + 2 * std::numbers::pi - 0.5);
  CHECK(ring.total_length <= perimeter + 8.0 + 0.5);
  CHECK(ring.total_length == doctest::Approx(path_length(ring.waypoints)));
  // Closed: returns to its start.
  CHECK((ring.waypoints.front() - ring.waypoints.back()).norm() < 1e-12);
  const double diag = 0.1 * std::sqrt(2.0);
  for (std::size_t i = 0; i < ring.waypoints.size(); ++i) {
    const Vec2& p = ring.waypoints[i];
    CHECK_FALSE(g.is_occupied(g.frame.cell_of(p)));
    const double d = to_roof(g, roof, p);
    CHECK(d >= 1.0 - 1e-9);
    CHECK(d <= 1.0 + diag + 1e-9);
    if (i > 0) CHECK((p - ring.waypoints[i - 1]).norm() <= diag + 1e-9);
  }
}

TEST_CASE("ring starts near the requested point and turns least") {
  auto g = free_grid(120, 110, 0.1);
  const Segment roof = roof_block(g, 40, 40, 79, 69);
  const Vec2 near(6.0, 2.0);  // below the roof's bottom edge
  const Path east = extract_footprint_ring(g, roof, 1.0, 0.5, near, 0.0);
  const Path west = extract_footprint_ring(g, roof, 1.0, 0.5, near, std::numbers::pi);
  CHECK((east.waypoints.front() - Vec2(6.0, 2.9)).norm() < 0.25);
  CHECK(east.waypoints[5].x() > east.waypoints[0].x());
  CHECK(west.waypoints[5].x() < west.waypoints[0].x());
  CHECK(east.total_length == doctest::Approx(west.total_length));
}

TEST_CASE("a fence flush with one side leaves an open arc") {
  auto g = free_grid(120, 110, 0.1);
  const Segment roof = roof_block(g, 40, 40, 79, 69);
  fill(g, 80, 30, 84, 79);  // fence along the east wall
  const Path arc = extract_footprint_ring(g, roof, 1.0, 0.5);
  REQUIRE(arc.waypoints.size() > 10);
  for (const Vec2& p : arc.waypoints) {
    CHECK(p.x() < 8.0);  // nothing east of the roof
    CHECK_FALSE(near_occupied(g, p, 0.5));
  }
  // The arc wraps the other three sides.
  bool south = false, west = false, north = false;
  for (const Vec2& p : arc.waypoints) {
    south |= p.y() < 3.5;
    north |= p.y() > 7.4;
    west |= p.x() < 3.5;
  }
  CHECK((south && west && north));
}

TEST_CASE("no ring when the standoff does not fit in the map") {
  auto g = free_grid(30, 30, 0.1);
  const Segment roof = roof_block(g, 10, 10, 19, 19);
  CHECK_THROWS_AS(extract_footprint_ring(g, roof, 5.0), NoRingExists);
  CHECK_THROWS_AS(footprint_search_loop(g, roof, 5.0), NoRingExists);
  CHECK_THROWS_AS(extract_footprint_ring(g, roof, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_footprint_ring(g, Segment{}, 1.0), std::invalid_argument);
}

TEST_CASE("search loop keeps both sides of an obstacle cutting the band") {
  auto g = free_grid(120, 110, 0.1);
  const Segment roof = roof_block(g, 40, 40, 79, 69);
  fill(g, 55, 28, 64, 35);  // car parked in front of the south wall
  const Path arc = extract_footprint_ring(g, roof, 1.5, 0.5);
  const Path loop = footprint_search_loop(g, roof, 1.5, 0.5);
  CHECK(loop.waypoints.size() > arc.waypoints.size());
  for (const Vec2& p : loop.waypoints) CHECK_FALSE(near_occupied(g, p, 0.5));
  // Waypoints on both sides of the car.
  bool left = false, right = false;
  for (const Vec2& p : loop.waypoints) {
    if (p.y() < 3.0) {
      left |= p.x() < 5.0;
      right |= p.x() > 7.0;
    }
  }
  CHECK((left && right));
}

TEST_CASE("straight path on an empty grid") {
  const auto g = free_grid(100, 100, 0.1);
  const PlanResult r = plan_path(g, Vec2(1.0, 1.0), Vec2(1.0, 6.0));
  REQUIRE(r.ok());
  CHECK(r.path.total_length == doctest::Approx(5.0));
  CHECK(r.straight == 50);
  CHECK(r.diagonal == 0);
  CHECK((r.path.waypoints.front() - Vec2(1.0, 1.0)).norm() < 1e-12);
  CHECK((r.path.waypoints.back() - Vec2(1.0, 6.0)).norm() < 1e-12);
}

TEST_CASE("wall with a single gap matches the Dijkstra oracle") {
  auto g = free_grid(60, 60, 0.1);
  fill(g, 30, 0, 31, 59);
  for (int r = 8; r <= 19; ++r) g.occupied(r, 30) = g.occupied(r, 31) = 0;
  const PlanResult r = plan_path(g, Vec2(0.5, 5.0), Vec2(5.5, 5.0), 0.3);
  REQUIRE(r.ok());
  const ByteRaster blocked = inflate(g, 0.3);
  const auto ref = oracle::dijkstra(blocked, g.frame.cell_of(Vec2(0.5, 5.0)), g.frame.cell_of(Vec2(5.5, 5.0)));
  REQUIRE(ref.has_value());
  CHECK(r.straight + r.diagonal * std::sqrt(2.0) ==
        doctest::Approx(ref->first + ref->second * std::sqrt(2.0)).epsilon(1e-12));
  bool through_gap = false;
  for (const Vec2& p : r.path.waypoints) through_gap |= std::abs(p.x() - 3.05) < 0.1 && p.y() > 0.75 && p.y() < 2.0;
  CHECK(through_gap);
}

TEST_CASE("planner reports occupied endpoints and unreachable goals") {
  auto g = free_grid(50, 50, 0.1);
  fill(g, 20, 20, 24, 24);
  CHECK(plan_path(g, Vec2(0.5, 0.5), Vec2(2.2, 2.2), 0.5).status == PlanStatus::GoalOccupied);
  // 0.4 m from the block: inside the 0.5 m inflation.
  CHECK(plan_path(g, Vec2(0.5, 0.5), Vec2(2.2, 2.8), 0.5).status == PlanStatus::GoalOccupied);
  CHECK(plan_path(g, Vec2(2.2, 2.2), Vec2(0.5, 0.5), 0.5).status == PlanStatus::StartOccupied);
  CHECK(plan_path(g, Vec2(-3.0, 0.5), Vec2(0.5, 0.5), 0.5).status == PlanStatus::StartOccupied);
  fill(g, 0, 35, 49, 35);
  CHECK(plan_path(g, Vec2(0.5, 0.5), Vec2(0.5, 4.5), 0.2).status == PlanStatus::Unreachable);
}

TEST_CASE("A* cost equals Dijkstra on random grids; waypoints stay clear") {
  std::mt19937_64 rng(99);
  std::bernoulli_distribution wall(0.08);
  std::uniform_int_distribution<int> pick(0, 63);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto g = free_grid(64, 64, 0.25);
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c) g.occupied(r, c) = wall(rng) ? 1 : 0;
    const ByteRaster blocked = oracle::inflate(g.occupied, 1.0);
    const Cell s(pick(rng), pick(rng)), t(pick(rng), pick(rng));
    const auto r = plan_path(g, g.frame.center(s), g.frame.center(t), 0.25);
    const auto ref = oracle::dijkstra(blocked, s, t);
    if (blocked(s.y(), s.x())) {
      CHECK(r.status == PlanStatus::StartOccupied);
      continue;
    }
    if (blocked(t.y(), t.x())) {
      CHECK(r.status == PlanStatus::GoalOccupied);
      continue;
    }
    CHECK(r.ok() == ref.has_value());
    if (!r.ok() || !ref) continue;
    ++compared;
    CHECK(r.straight + r.diagonal * std::sqrt(2.0) ==
          doctest::Approx(ref->first + ref->second * std::sqrt(2.0)).epsilon(1e-12));
    for (const Vec2& p : r.path.waypoints) CHECK_FALSE(near_occupied(g, p, 0.25));
  }
  CHECK(compared > 5);
}

TEST_CASE("inflation covers cells within the radius") {
  auto g = free_grid(21, 21, 0.1);
  g.occupied(10, 10) = 1;
  const ByteRaster b = inflate(g, 0.3);
  CHECK((b == oracle::inflate(g.occupied, 3.0)).all());
  CHECK(b(10, 13) == 1);
  CHECK(b(10, 14) == 0);
  CHECK(b(12, 12) == 1);  // 0.283 m
  CHECK(b(13, 12) == 0);  // 0.361 m
}

TEST_CASE("occupancy ASCII round trip") {
  auto g = free_grid(7, 4, 0.125, Vec2(-2.5, 3.75));
  fill(g, 1, 1, 3, 2);
  std::stringstream ss;
  write_ascii(ss, g);
  CHECK(ss.str().substr(0, ss.str().find('\n')) == "7 4 0.125 -2.5 3.75");
  const auto back = read_occupancy_ascii(ss);
  CHECK(back.frame.width == 7);
  CHECK(back.frame.height == 4);
  CHECK(back.frame.resolution == 0.125);
  CHECK(back.frame.origin == g.frame.origin);
  CHECK((back.occupied == g.occupied).all());

  std::istringstream bad("3 2 0.1 0 0\n#.#\n#x#\n");
  CHECK_THROWS_AS(read_occupancy_ascii(bad), std::runtime_error);
  std::istringstream short_row("3 2 0.1 0 0\n#.#\n#\n");
  CHECK_THROWS_AS(read_occupancy_ascii(short_row), std::runtime_error);
}
