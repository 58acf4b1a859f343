#pragma once

#include "doorstep/sensors.hpp"

#include <optional>
#include <vector>

namespace doorstep {

struct TimedPose {
  double t = 0.0;
  DronePose pose;
};

/// Simulated clock plus the drone state; every motion goes through step() so
/// the trajectory and elapsed time stay consistent with the speed limit.
class Flight {
 public:
  explicit Flight(const DronePose& start, double dt = 0.1, double max_speed = 0.5,
                  double max_yaw_rate = std::numbers::pi / 4);

  const DronePose& pose() const { return pose_; }
  double dt() const { return dt_; }
  double max_speed() const { return max_speed_; }
  long ticks() const { return ticks_; }
  double time() const { return static_cast<double>(ticks_) * dt_; }
  const std::vector<TimedPose>& trajectory() const { return trajectory_; }

  void step(const VelocityCommand& cmd);
  void hold() { step(VelocityCommand{}); }

  /// One tick toward `target` (x, y, altitude) and, if given, toward `yaw`.
  /// Snaps onto targets within one tick's reach. Returns true once both are met.
  bool step_toward(const Vec3& target, std::optional<double> yaw = std::nullopt);

  /// Yaw-only tick toward `yaw`; returns true once it is reached.
  bool turn_toward(double yaw) { return step_toward(pose_.xyz(), yaw); }

  /// Sum of 3D segment lengths along the trajectory.
  double path_length() const;

 private:
  DronePose pose_;
  double dt_;
  double max_speed_;
  double max_yaw_rate_;
  long ticks_ = 0;
  std::vector<TimedPose> trajectory_;
};

/// Heading from a to b.
inline double heading_to(const Vec2& a, const Vec2& b) { return std::atan2(b.y() - a.y(), b.x() - a.x()); }

}  // namespace doorstep
