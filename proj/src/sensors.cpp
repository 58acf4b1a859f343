#include "doorstep/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace doorstep {

SemanticGrid render_aerial(const WorldModel& world, const DronePose& pose, const CameraModel& cam) {
  cam.validate();
  const double h = pose.altitude;
  if (!(h > 0.0)) throw std::invalid_argument("aerial capture needs a positive altitude");
  const double sx = h / cam.fx;
  const double sy = h / cam.fy;
  SemanticGrid grid(cam.width, cam.height, sx, ClassLabel::Unknown);

  // Same arithmetic as backproject() so every pixel agrees with class_at().
  const auto ground = [&](int u, int v) {
    return Vec2(pose.x + h * (u - cam.cx) / cam.fx, pose.y + h * (v - cam.cy) / cam.fy);
  };
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      if (world.in_bounds(ground(u, v))) grid.set(u, v, ClassLabel::Grass);
    }
  }

  // Paint back to front so the first polygon in class_at() order wins.
  const auto paint = [&](const Polygon& poly, ClassLabel label) {
    const Box b = bounding_box(poly);
    const int u0 = std::max(0, static_cast<int>(std::floor((b.min.x() - pose.x) / sx + cam.cx)) - 1);
    const int u1 = std::min(cam.width - 1, static_cast<int>(std::ceil((b.max.x() - pose.x) / sx + cam.cx)) + 1);
    const int v0 = std::max(0, static_cast<int>(std::floor((b.min.y() - pose.y) / sy + cam.cy)) - 1);
    const int v1 = std::min(cam.height - 1, static_cast<int>(std::ceil((b.max.y() - pose.y) / sy + cam.cy)) + 1);
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const Vec2 g = ground(u, v);
        if (world.in_bounds(g) && b.contains(g) && contains(poly, g)) grid.set(u, v, label);
      }
    }
  };
  for (auto it = world.regions.rbegin(); it != world.regions.rend(); ++it) paint(it->polygon, it->label);
  for (auto it = world.houses.rbegin(); it != world.houses.rend(); ++it) paint(it->footprint, ClassLabel::Roof);
  return grid;
}

void DetectorParams::validate() const {
  if (!(fov > 0.0 && fov <= 2 * std::numbers::pi)) throw std::invalid_argument("detector fov must be in (0, 2pi]");
  if (!(max_range > 0.0)) throw std::invalid_argument("detector range must be positive");
  if (!(max_incidence > 0.0 && max_incidence <= std::numbers::pi / 2)) {
    throw std::invalid_argument("detector incidence limit must be in (0, pi/2]");
  }
  if (!(miss_probability >= 0.0 && miss_probability <= 1.0)) throw std::invalid_argument("miss probability outside [0,1]");
}

bool line_of_sight(const WorldModel& world, const Vec2& a, const Vec2& b) {
  for (const auto& h : world.houses) {
    if (segment_hits_polygon(a, b, h.footprint)) return false;
  }
  for (const auto& r : world.regions) {
    if (is_obstacle(r.label) && segment_hits_polygon(a, b, r.polygon)) return false;
  }
  return true;
}

std::optional<DoorDetection> detect_door(const WorldModel& world, const DronePose& pose, const DetectorParams& params,
                                         std::mt19937_64* rng) {
  const Door& door = world.door;
  const Vec2 to_door = door.center - pose.xy();
  const double range = to_door.norm();
  if (range > params.max_range || range < 1e-9) return std::nullopt;
  const double bearing = normalize_angle(std::atan2(to_door.y(), to_door.x()) - pose.yaw);
  if (std::abs(bearing) > params.fov / 2) return std::nullopt;
  // Seen from the front side of the wall, not too obliquely.
  const double cos_incidence = -to_door.dot(door.normal) / range;
  if (cos_incidence <= std::cos(params.max_incidence)) return std::nullopt;
  if (!line_of_sight(world, pose.xy(), door.center + 0.05 * door.normal)) return std::nullopt;
  if (params.miss_probability > 0.0) {
    if (rng == nullptr) throw std::invalid_argument("detector miss probability needs an rng");
    if (std::bernoulli_distribution(params.miss_probability)(*rng)) return std::nullopt;
  }
  return DoorDetection{door.center, door.normal, pose};
}

ScanResult scan_surroundings(const WorldModel& world, const DronePose& pose, const GridFrame& frame, double radius,
                             double fov) {
  ScanResult out;
  if (!(radius > 0.0)) return out;
  const double res = frame.resolution;
  const double step = res / 2;
  const int rays = std::max(8, static_cast<int>(std::ceil(fov * radius / res)));
  const bool full = fov >= 2 * std::numbers::pi - 1e-12;
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(frame.width) * frame.height, 0);  // 1 free, 2 occupied
  std::vector<std::size_t> touched;

  for (int i = 0; i < rays; ++i) {
    const double a = full ? 2 * std::numbers::pi * i / rays : pose.yaw - fov / 2 + fov * (i + 0.5) / rays;
    const Vec2 dir(std::cos(a), std::sin(a));
    for (double s = step; s <= radius; s += step) {
      const Vec2 p = pose.xy() + s * dir;
      if (!world.in_bounds(p)) break;
      const Cell c = frame.cell_of(p);
      if (!frame.in_bounds(c)) break;
      const std::size_t k = frame.index(c);
      if (is_clearance_source(world.class_at(p))) {
        if (mark[k] == 0) touched.push_back(k);
        mark[k] = 2;
        break;
      }
      if (mark[k] == 0) {
        mark[k] = 1;
        touched.push_back(k);
      }
    }
  }
  std::sort(touched.begin(), touched.end());
  for (std::size_t k : touched) {
    const Cell c(static_cast<int>(k % frame.width), static_cast<int>(k / frame.width));
    (mark[k] == 2 ? out.occupied : out.free).push_back(c);
  }
  return out;
}

std::vector<Cell> local_obstacle_scan(const WorldModel& world, const DronePose& pose, const GridFrame& frame,
                                      double radius) {
  return scan_surroundings(world, pose, frame, radius).occupied;
}

DronePose step_drone(const DronePose& pose, const VelocityCommand& cmd, double dt, double max_speed) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  Vec3 v = cmd.velocity;
  const double speed = v.norm();
  if (speed > max_speed) v *= max_speed / speed;
  DronePose next = pose;
  next.x += v.x() * dt;
  next.y += v.y() * dt;
  next.altitude = std::max(0.0, pose.altitude + v.z() * dt);
  next.yaw = normalize_angle(pose.yaw + cmd.yaw_rate * dt);
  return next;
}

}  // namespace doorstep
