#include "doorstep/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace doorstep {

std::string_view to_string(DeliveryStatus s) {
  switch (s) {
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::DoorNotFound: return "door_not_found";
    case DeliveryStatus::Timeout: return "timeout";
    case DeliveryStatus::Stuck: return "stuck";
  }
  return "delivered";
}

NavigationContext::NavigationContext(Flight& flight, const WorldModel& world, const OccupancyGrid& occ,
                                     const NavigationConfig& config)
    : flight_(flight), world_(world), overlay_(occ), blocked_(inflate(occ, config.inflation)), config_(config),
      rng_(config.seed) {
  config_.detector.validate();
}

std::optional<DoorDetection> NavigationContext::query() {
  ++queries_;
  auto det = detect_door(world_, flight_.pose(), config_.detector, &rng_);
  if (det) detections_.push_back(*det);
  return det;
}

int NavigationContext::paint(const std::vector<Cell>& cells) {
  const GridFrame& f = overlay_.frame;
  const double r = config_.inflation / f.resolution;
  const double r2 = r * r + 1e-9;  // same rounding as inflate()
  const int k = static_cast<int>(std::floor(r + 1e-9));
  int fresh = 0;
  for (const Cell& c : cells) {
    if (!f.in_bounds(c) || overlay_.is_occupied(c)) continue;
    overlay_.occupied(c.y(), c.x()) = 1;
    ++fresh;
    for (int dy = -k; dy <= k; ++dy) {
      for (int dx = -k; dx <= k; ++dx) {
        const Cell n(c.x() + dx, c.y() + dy);
        if (f.in_bounds(n) && static_cast<double>(dx * dx + dy * dy) <= r2) blocked_(n.y(), n.x()) = 1;
      }
    }
  }
  return fresh;
}

std::vector<Cell> NavigationContext::sense() {
  std::vector<Cell> cells = local_obstacle_scan(world_, flight_.pose(), overlay_.frame, config_.scan_radius);
  std::vector<Cell> fresh;
  for (const Cell& c : cells) {
    if (!overlay_.is_occupied(c)) fresh.push_back(c);
  }
  return fresh;
}

std::optional<DoorDetection> yaw_sweep_search(NavigationContext& ctx) {
  Flight& flight = ctx.flight();
  const NavigationConfig& cfg = ctx.config();
  const double base = flight.pose().yaw;
  const int steps = static_cast<int>(std::floor(cfg.yaw_range / cfg.yaw_step + 1e-9));
  std::vector<double> offsets{0.0};
  for (int i = 1; i <= steps; ++i) offsets.push_back(-i * cfg.yaw_step);
  for (int i = 1; i <= steps; ++i) offsets.push_back(i * cfg.yaw_step);
  for (double off : offsets) {
    const double yaw = normalize_angle(base + off);
    while (!flight.turn_toward(yaw)) {
    }
    if (auto det = ctx.query()) return det;
  }
  return std::nullopt;
}

PlanResult dynamic_replan(const Path& current, const std::vector<Cell>& sensed, const OccupancyGrid& occ,
                          const Vec2& position, double inflation) {
  if (current.empty()) throw std::invalid_argument("cannot re-plan an empty path");
  const GridFrame& f = occ.frame;
  bool hit = false;
  for (const Cell& c : sensed) {
    if (!f.in_bounds(c)) continue;
    const Vec2 q = f.center(c);
    for (const Vec2& w : current.waypoints) {
      if ((w - q).norm() <= inflation + 1e-9) {
        hit = true;
        break;
      }
    }
    if (hit) break;
  }
  if (!hit) {
    PlanResult same;
    same.status = PlanStatus::Ok;
    same.path = current;
    return same;
  }
  OccupancyGrid overlay = occ;
  for (const Cell& c : sensed) {
    if (f.in_bounds(c)) overlay.occupied(c.y(), c.x()) = 1;
  }
  return plan_path_blocked(f, inflate(overlay, inflation), position, current.waypoints.back(), true);
}

ApproachPoint door_approach_point(const DoorDetection& det, double offset, const GridFrame* frame,
                                  const ByteRaster* blocked) {
  ApproachPoint out{det.door_point + offset * det.wall_normal, false};
  if (frame == nullptr || blocked == nullptr) return out;
  const auto free = [&](const Vec2& p) {
    const Cell c = frame->cell_of(p);
    return frame->in_bounds(c) && (*blocked)(c.y(), c.x()) == 0;
  };
  if (free(out.point)) return out;
  const double step = frame->resolution / 2;
  for (double s = offset + step; s <= offset + 5.0; s += step) {
    const Vec2 p = det.door_point + s * det.wall_normal;
    if (free(p)) return ApproachPoint{p, true};
  }
  out.fallback = true;
  return out;
}

namespace {

enum class Leg { Arrived, Detected, Blocked, Timeout };

// Fly a planned path tick by tick with periodic scans and re-planning.
Leg traverse(NavigationContext& ctx, Path path, const std::function<std::optional<double>()>& yaw, bool detect,
             std::optional<DoorDetection>& det, int& replans) {
  Flight& flight = ctx.flight();
  const NavigationConfig& cfg = ctx.config();
  std::size_t i = 0;
  long ticks = 0;
  while (true) {
    if (detect) {
      det = ctx.query();
      if (det) return Leg::Detected;
    }
    if (i >= path.waypoints.size()) return Leg::Arrived;
    if (ctx.out_of_time()) return Leg::Timeout;
    const Vec2 target = path.waypoints[i];
    flight.step_toward(Vec3(target.x(), target.y(), flight.pose().altitude), yaw());
    while (i < path.waypoints.size() && (flight.pose().xy() - path.waypoints[i]).norm() < 1e-9) ++i;
    if (++ticks % cfg.scan_every == 0) {
      const std::vector<Cell> fresh = ctx.sense();
      if (!fresh.empty() && i < path.waypoints.size()) {
        std::vector<Vec2> rest{flight.pose().xy()};
        rest.insert(rest.end(), path.waypoints.begin() + static_cast<long>(i), path.waypoints.end());
        const Path remaining = make_path(std::move(rest));
        const PlanResult rp = dynamic_replan(remaining, fresh, ctx.map(), flight.pose().xy(), cfg.inflation);
        ctx.paint(fresh);
        if (!rp.ok()) return Leg::Blocked;
        if (rp.path.waypoints != remaining.waypoints) {
          ++replans;
          path = rp.path;
          i = 0;
        }
      } else {
        ctx.paint(fresh);
      }
    }
  }
}

Vec2 nearest_point(const std::vector<Vec2>& pts, const Vec2& p) {
  Vec2 best = p;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) {
    const double d = (q - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = q;
    }
  }
  return best;
}

}  // namespace

bool fly_to(NavigationContext& ctx, const Vec2& goal, std::optional<double> final_yaw, int& replans) {
  for (int attempt = 0; attempt <= ctx.config().max_replans; ++attempt) {
    const PlanResult plan = plan_path_blocked(ctx.map().frame, ctx.blocked(), ctx.flight().pose().xy(), goal, true);
    if (!plan.ok()) return false;
    std::optional<DoorDetection> none;
    const Leg leg = traverse(ctx, plan.path, [&] { return final_yaw; }, false, none, replans);
    if (leg == Leg::Arrived) return true;
    if (leg == Leg::Timeout) return false;
    ++replans;
  }
  return false;
}

void land(Flight& flight) {
  const Vec3 ground(flight.pose().x, flight.pose().y, 0.0);
  while (!flight.step_toward(ground)) {
  }
}

SearchResult follow_footprint_search(NavigationContext& ctx, const Path& ring, const std::vector<Vec2>& roof_points) {
  if (ring.empty()) throw std::invalid_argument("footprint ring is empty");
  SearchResult out;
  Flight& flight = ctx.flight();
  const NavigationConfig& cfg = ctx.config();
  const GridFrame& f = ctx.map().frame;
  const auto face_house = [&]() -> std::optional<double> {
    if (roof_points.empty()) return std::nullopt;
    return heading_to(flight.pose().xy(), nearest_point(roof_points, flight.pose().xy()));
  };
  const auto blocked_at = [&](const Vec2& p) {
    const Cell c = f.cell_of(p);
    return !f.in_bounds(c) || ctx.blocked()(c.y(), c.x()) != 0;
  };

  int failures = 0;
  int replans = 0;
  std::size_t i = 0;
  while (i < ring.waypoints.size()) {
    const Vec2 target = ring.waypoints[i];
    if (blocked_at(target)) {
      ++i;
      continue;
    }
    Path leg_path;
    const Vec2 here = flight.pose().xy();
    if ((target - here).norm() <= f.resolution * std::numbers::sqrt2 + 1e-9) {
      leg_path = make_path({target});
    } else {
      const PlanResult plan = plan_path_blocked(f, ctx.blocked(), here, target, true);
      if (!plan.ok()) {
        if (++failures > cfg.max_replans) {
          out.stuck = true;
          return out;
        }
        ++i;
        continue;
      }
      leg_path = plan.path;
    }
    const Leg leg = traverse(ctx, leg_path, face_house, true, out.detection, replans);
    if (leg == Leg::Detected) return out;
    if (leg == Leg::Timeout) {
      out.timed_out = true;
      return out;
    }
    if (leg == Leg::Blocked) {
      if (++failures > cfg.max_replans) {
        out.stuck = true;
        return out;
      }
      continue;
    }
    failures = 0;
    ++i;
  }
  // Last look from the end of the loop.
  out.detection = ctx.query();
  return out;
}

DeliveryOutcome deliver_to_front_door(Flight& flight, const WorldModel& world, const OccupancyGrid& occ,
                                      const Segment& roof, const NavigationConfig& config) {
  NavigationContext ctx(flight, world, occ, config);
  DeliveryOutcome out;
  const auto finish = [&](DeliveryStatus status) {
    out.status = status;
    out.elapsed = status == DeliveryStatus::Timeout ? config.time_cap : flight.time();
    out.trajectory = flight.trajectory();
    out.detections = ctx.detections();
    return out;
  };
  if (ctx.out_of_time()) return finish(DeliveryStatus::Timeout);

  std::optional<DoorDetection> det = yaw_sweep_search(ctx);
  out.queries_before_footprint = ctx.queries();
  if (!det) {
    std::vector<Vec2> roof_points;
    for (const Cell& c : roof.pixels) roof_points.push_back(occ.frame.center(c));
    Path ring;
    try {
      ring = footprint_search_loop(ctx.map(), roof, config.standoff, config.inflation, flight.pose().xy(),
                                    flight.pose().yaw);
    } catch (const NoRingExists&) {
      return finish(DeliveryStatus::DoorNotFound);
    }
    const SearchResult sr = follow_footprint_search(ctx, ring, roof_points);
    if (sr.timed_out) return finish(DeliveryStatus::Timeout);
    if (sr.stuck) return finish(DeliveryStatus::Stuck);
    if (!sr.detection) return finish(DeliveryStatus::DoorNotFound);
    det = sr.detection;
  }

  const ApproachPoint ap = door_approach_point(*det, config.approach_offset, &ctx.map().frame, &ctx.blocked());
  out.approach_point = ap.point;
  out.approach_fallback = ap.fallback;
  const double face_door = heading_to(ap.point, det->door_point);
  if (!fly_to(ctx, ap.point, face_door, out.replans)) {
    return finish(ctx.out_of_time() ? DeliveryStatus::Timeout : DeliveryStatus::Stuck);
  }
  land(flight);
  if (flight.time() > config.time_cap) return finish(DeliveryStatus::Timeout);
  const bool there = (flight.pose().xy() - ap.point).norm() <= config.land_tolerance && flight.pose().altitude <= 0.05;
  return finish(there ? DeliveryStatus::Delivered : DeliveryStatus::Stuck);
}

}  // namespace doorstep
