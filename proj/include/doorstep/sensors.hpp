#pragma once

#include "doorstep/camera.hpp"
#include "doorstep/semantics.hpp"
#include "doorstep/world.hpp"

#include <optional>
#include <random>
#include <vector>

namespace doorstep {

/// Ground-truth semantic capture: pixel (u, v) sees the ground point
/// pose.xy + backproject((u, v), h).xy. Off-world pixels are Unknown.
/// Resolution is h / fx (meters per pixel).
SemanticGrid render_aerial(const WorldModel& world, const DronePose& pose, const CameraModel& cam);

/// Downward range finder over flat ground.
inline double range_find(const WorldModel&, const DronePose& pose) { return pose.altitude; }

struct DoorDetection {
  Vec2 door_point = Vec2::Zero();
  Vec2 wall_normal = Vec2(0.0, -1.0);
  DronePose source_pose;
};

struct DetectorParams {
  double fov = std::numbers::pi / 2;               // full horizontal field of view
  double max_range = 8.0;                           // m
  double max_incidence = 75.0 * std::numbers::pi / 180.0;
  double miss_probability = 0.0;

  void validate() const;
};

/// Geometric stand-in for a learned door detector: the recipient's door is
/// reported iff it is in range, inside the field of view, seen at an incidence
/// below the limit and not hidden behind a roof or obstacle. With a non-zero
/// miss probability, `rng` must be supplied.
std::optional<DoorDetection> detect_door(const WorldModel& world, const DronePose& pose, const DetectorParams& params,
                                         std::mt19937_64* rng = nullptr);

/// True if nothing that blocks sight (roofs, obstacles) lies strictly between a and b.
bool line_of_sight(const WorldModel& world, const Vec2& a, const Vec2& b);

struct ScanResult {
  std::vector<Cell> free;
  std::vector<Cell> occupied;
};

/// Ray-cast range scan at hover height, reported as cells of `frame`. Rays leave
/// the drone at an angular spacing fine enough to hit every cell at `radius`,
/// are marched in quarter-cell steps and stop at the first roof / obstacle
/// sample, whose cell is reported occupied. Cells crossed before it are free.
/// `fov` limits the scan to a cone about the heading (2*pi = all around).
ScanResult scan_surroundings(const WorldModel& world, const DronePose& pose, const GridFrame& frame, double radius,
                             double fov = 2 * std::numbers::pi);

/// Occupied cells only, all around.
std::vector<Cell> local_obstacle_scan(const WorldModel& world, const DronePose& pose, const GridFrame& frame,
                                      double radius);

struct VelocityCommand {
  Vec3 velocity = Vec3::Zero();  // m/s, world frame (x, y, up)
  double yaw_rate = 0.0;         // rad/s
};

/// First-order kinematics; speed clamped to `max_speed`, yaw wrapped into
/// (-pi, pi], altitude kept >= 0. Throws for dt <= 0.
DronePose step_drone(const DronePose& pose, const VelocityCommand& cmd, double dt, double max_speed = 0.5);

}  // namespace doorstep
