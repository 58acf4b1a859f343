#pragma once

#include "doorstep/geometry.hpp"
#include "doorstep/semantics.hpp"

#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace doorstep {

enum class DoorVisibility : std::uint8_t { Open, Recessed, Enclosed };

std::string_view to_string(DoorVisibility v);
DoorVisibility door_visibility_from_string(std::string_view s);  // throws std::invalid_argument

/// Planar position, altitude above the flat ground, and heading in (-pi, pi].
struct DronePose {
  double x = 0.0;
  double y = 0.0;
  double altitude = 0.0;
  double yaw = 0.0;

  Vec2 xy() const { return Vec2(x, y); }
  Vec3 xyz() const { return Vec3(x, y, altitude); }

  friend bool operator==(const DronePose&, const DronePose&) = default;
};

struct Door {
  Vec2 center = Vec2::Zero();
  double width = 1.0;
  Vec2 normal = Vec2(0.0, -1.0);  // outward from the wall
  DoorVisibility visibility = DoorVisibility::Open;
};

struct House {
  Polygon footprint;
  bool recipient = false;
};

/// A ground-truth feature polygon; every point not covered by a house or a
/// region is grass.
struct Region {
  ClassLabel label = ClassLabel::Grass;
  Polygon polygon;
};

struct WorldModel {
  static constexpr std::string_view kSchema = "doorstep.world/1";

  std::uint64_t seed = 0;
  Vec2 size = Vec2(60.0, 60.0);
  std::vector<House> houses;    // houses[0] is the recipient
  std::vector<Region> regions;  // paved, vegetation, fence, car, tree
  Door door;
  Vec2 front_direction = Vec2(0.0, -1.0);  // the recipient's front, toward the road
  Polygon front_yard;                      // yard attribution halves, partition of the bounds
  Polygon back_yard;
  std::vector<Polygon> front_paved;  // road and everything paved connected to it
  DronePose start;                   // GPS arrival pose above the house

  const House& recipient() const { return houses.front(); }
  Vec2 recipient_center() const { return centroid(recipient().footprint); }

  bool in_bounds(const Vec2& p) const {
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() < size.x() && p.y() < size.y();
  }

  /// Ground-truth class of a ground point; Unknown off-world.
  ClassLabel class_at(const Vec2& p) const;

  /// Ground-truth yard attribution of a ground point relative to the recipient.
  Side yard_side(const Vec2& p) const;

  bool in_front_paved(const Vec2& p) const;

  /// Distance from p to the nearest roof or obstacle polygon (0 inside).
  double clearance_at(const Vec2& p) const;

  /// Index of the house whose footprint contains p, or -1.
  int house_at(const Vec2& p) const;

  /// Throws std::logic_error naming the first violated invariant.
  void check_invariants() const;
};

struct GeneratorParams {
  std::uint64_t seed = 1;
  double house_width_min = 9.0;
  double house_width_max = 13.0;
  double house_depth_min = 7.0;
  double house_depth_max = 10.0;
  double obstacle_density = 0.5;
  DoorVisibility door_mode = DoorVisibility::Open;
  int neighbor_count = 2;
  double gps_offset_sigma = 1.0;
  double altitude_min = 20.0;
  double altitude_max = 30.0;
  double world_size = 60.0;

  void validate() const;  // throws std::invalid_argument
};

/// Seeded procedural street scene: road along one map edge, the recipient house
/// in the middle lot, up to two neighbors, yards, driveways and clutter. The
/// layout is built facing one edge, then turned by a seeded multiple of 90 deg.
WorldModel generate_world(const GeneratorParams& params);

}  // namespace doorstep
