#include "doorstep/flight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace doorstep {

Flight::Flight(const DronePose& start, double dt, double max_speed, double max_yaw_rate)
    : pose_(start), dt_(dt), max_speed_(max_speed), max_yaw_rate_(max_yaw_rate) {
  if (!(dt > 0.0) || !(max_speed > 0.0) || !(max_yaw_rate > 0.0)) {
    throw std::invalid_argument("flight needs positive dt, speed and yaw rate");
  }
  pose_.yaw = normalize_angle(pose_.yaw);
  trajectory_.push_back({0.0, pose_});
}

void Flight::step(const VelocityCommand& cmd) {
  VelocityCommand c = cmd;
  c.yaw_rate = std::clamp(c.yaw_rate, -max_yaw_rate_, max_yaw_rate_);
  pose_ = step_drone(pose_, c, dt_, max_speed_);
  ++ticks_;
  trajectory_.push_back({time(), pose_});
}

bool Flight::step_toward(const Vec3& target, std::optional<double> yaw) {
  const Vec3 delta = target - pose_.xyz();
  const double reach = max_speed_ * dt_;
  double yaw_err = yaw ? normalize_angle(*yaw - pose_.yaw) : 0.0;
  const double turn = max_yaw_rate_ * dt_;

  if (delta.norm() <= reach && std::abs(yaw_err) <= turn) {
    // Final tick lands exactly on the target.
    pose_.x = target.x();
    pose_.y = target.y();
    pose_.altitude = std::max(0.0, target.z());
    if (yaw) pose_.yaw = normalize_angle(*yaw);
    ++ticks_;
    trajectory_.push_back({time(), pose_});
    return true;
  }
  VelocityCommand cmd;
  cmd.velocity = delta.norm() <= reach ? Vec3(delta / dt_) : Vec3(delta.normalized() * max_speed_);
  cmd.yaw_rate = std::clamp(yaw_err, -turn, turn) / dt_;
  if (delta.norm() <= reach) {
    step(VelocityCommand{Vec3::Zero(), cmd.yaw_rate});
    pose_.x = target.x();
    pose_.y = target.y();
    pose_.altitude = std::max(0.0, target.z());
    trajectory_.back().pose = pose_;
  } else {
    step(cmd);
  }
  yaw_err = yaw ? normalize_angle(*yaw - pose_.yaw) : 0.0;
  return (pose_.xyz() - target).norm() == 0.0 && std::abs(yaw_err) < 1e-12;
}

double Flight::path_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < trajectory_.size(); ++i) {
    len += (trajectory_[i].pose.xyz() - trajectory_[i - 1].pose.xyz()).norm();
  }
  return len;
}

}  // namespace doorstep
