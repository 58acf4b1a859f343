#include "doorstep/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <set>

namespace doorstep {

ExplorationMap ExplorationMap::covering(const Vec2& size, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("map resolution must be positive");
  GridFrame f;
  f.resolution = resolution;
  f.origin = Vec2::Constant(resolution / 2);
  f.width = static_cast<int>(std::ceil(size.x() / resolution - 1e-9));
  f.height = static_cast<int>(std::ceil(size.y() / resolution - 1e-9));
  return ExplorationMap(f);
}

void ExplorationMap::observe(const ScanResult& scan) {
  for (const Cell& c : scan.free) {
    if (frame.in_bounds(c) && at(c) == CellState::Unknown) set(c, CellState::Free);
  }
  for (const Cell& c : scan.occupied) {
    if (frame.in_bounds(c)) set(c, CellState::Occupied);
  }
}

std::size_t ExplorationMap::count(CellState s) const {
  return static_cast<std::size_t>((cells == static_cast<std::uint8_t>(s)).count());
}

std::vector<FrontierCluster> detect_frontiers(const ExplorationMap& map, const Vec2& drone) {
  const GridFrame& f = map.frame;
  const auto state = [&](int c, int r) {
    return (c < 0 || r < 0 || c >= f.width || r >= f.height) ? CellState::Occupied
                                                             : static_cast<CellState>(map.cells(r, c));
  };
  ByteRaster frontier = ByteRaster::Zero(f.height, f.width);
  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      if (state(c, r) != CellState::Free) continue;
      bool edge = false;
      for (int dr = -1; dr <= 1 && !edge; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr != 0 || dc != 0) && state(c + dc, r + dr) == CellState::Unknown) {
            edge = true;
            break;
          }
        }
      }
      frontier(r, c) = edge ? 1 : 0;
    }
  }

  std::vector<FrontierCluster> out;
  ByteRaster seen = ByteRaster::Zero(f.height, f.width);
  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      if (!frontier(r, c) || seen(r, c)) continue;
      FrontierCluster cl;
      std::deque<Cell> queue{Cell(c, r)};
      seen(r, c) = 1;
      while (!queue.empty()) {
        const Cell q = queue.front();
        queue.pop_front();
        cl.cells.push_back(q);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const Cell n(q.x() + dc, q.y() + dr);
            if (f.in_bounds(n) && frontier(n.y(), n.x()) && !seen(n.y(), n.x())) {
              seen(n.y(), n.x()) = 1;
              queue.push_back(n);
            }
          }
        }
      }
      std::sort(cl.cells.begin(), cl.cells.end(),
                [](const Cell& a, const Cell& b) { return a.y() != b.y() ? a.y() < b.y() : a.x() < b.x(); });
      Vec2 sum = Vec2::Zero();
      for (const Cell& q : cl.cells) sum += f.center(q);
      cl.centroid = sum / static_cast<double>(cl.cells.size());
      cl.distance = (cl.centroid - drone).norm();
      out.push_back(std::move(cl));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FrontierCluster& a, const FrontierCluster& b) { return a.distance < b.distance; });
  return out;
}

Vec2 random_front_spot(const WorldModel& world, double clearance, double radius, std::mt19937_64& rng) {
  const Vec2 center = world.recipient_center();
  std::uniform_real_distribution<double> u(-radius, radius);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Vec2 p = center + Vec2(u(rng), u(rng));
    if ((p - center).norm() > radius || !world.in_bounds(p)) continue;
    if (world.yard_side(p) != Side::Front) continue;
    const ClassLabel l = world.class_at(p);
    if (l != ClassLabel::Grass && l != ClassLabel::PavedArea) continue;
    if (world.clearance_at(p) < clearance) continue;
    return p;
  }
  throw std::runtime_error("no clear spot in front of the house");
}

void descend_at(Flight& flight, const Vec2& spot, double hover_height) {
  const Vec3 above(spot.x(), spot.y(), flight.pose().altitude);
  while (!flight.step_toward(above)) {
  }
  const Vec3 hover(spot.x(), spot.y(), hover_height);
  while (!flight.step_toward(hover)) {
  }
}

namespace {

class Explorer {
 public:
  Explorer(Flight& flight, const WorldModel& world, const FrontierConfig& cfg)
      : flight_(flight), world_(world), cfg_(cfg), map_(ExplorationMap::covering(world.size, cfg.resolution)),
        blocked_(ByteRaster::Zero(map_.frame.height, map_.frame.width)), rng_(cfg.nav.seed) {}

  enum class Leg { Arrived, Detected, Blocked, Stale, Timeout };

  ExplorationMap& map() { return map_; }
  const ByteRaster& blocked() const { return blocked_; }
  std::vector<DoorDetection>& detections() { return detections_; }
  std::optional<DoorDetection>& detection() { return detection_; }
  bool out_of_time() const { return flight_.time() >= cfg_.time_cap - 1e-9; }

  void scan() {
    const ScanResult s = scan_surroundings(world_, flight_.pose(), map_.frame, cfg_.nav.scan_radius, cfg_.scan_fov);
    const double r = cfg_.nav.inflation / map_.frame.resolution;
    const int k = static_cast<int>(std::floor(r));
    for (const Cell& c : s.occupied) {
      if (!map_.frame.in_bounds(c) || map_.at(c) == CellState::Occupied) continue;
      for (int dy = -k; dy <= k; ++dy) {
        for (int dx = -k; dx <= k; ++dx) {
          const Cell n(c.x() + dx, c.y() + dy);
          if (map_.frame.in_bounds(n) && dx * dx + dy * dy <= r * r) blocked_(n.y(), n.x()) = 1;
        }
      }
    }
    map_.observe(s);
  }

  bool query() {
    auto det = detect_door(world_, flight_.pose(), cfg_.nav.detector, &rng_);
    if (!det) return false;
    detections_.push_back(*det);
    detection_ = det;
    return true;
  }

  // One control tick plus sensing; true if the door was seen.
  bool tick(const Vec3& target, std::optional<double> yaw, bool detect) {
    flight_.step_toward(target, yaw);
    if (++ticks_ % cfg_.nav.scan_every == 0) scan();
    return detect && query();
  }

  bool is_blocked(const Vec2& p) const {
    const Cell c = map_.frame.cell_of(p);
    return !map_.frame.in_bounds(c) || blocked_(c.y(), c.x()) != 0;
  }

  // Follow a path, turning to face each leg first. `stale` ends the leg early
  // (e.g. the frontier was resolved on the way).
  Leg follow(const Path& path, bool detect, const std::function<bool()>& stale, std::optional<double> final_yaw) {
    const double alt = flight_.pose().altitude;
    for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
      const Vec2 w = path.waypoints[i];
      if ((w - flight_.pose().xy()).norm() < 1e-9) continue;
      const double yaw = heading_to(flight_.pose().xy(), w);
      // Yaw before moving.
      while (std::abs(normalize_angle(yaw - flight_.pose().yaw)) > 0.1) {
        if (out_of_time()) return Leg::Timeout;
        if (tick(flight_.pose().xyz(), yaw, detect)) return Leg::Detected;
      }
      while ((w - flight_.pose().xy()).norm() >= 1e-9) {
        if (out_of_time()) return Leg::Timeout;
        const bool last = i + 1 == path.waypoints.size();
        if (tick(Vec3(w.x(), w.y(), alt), last && final_yaw ? final_yaw : std::optional<double>(yaw), detect)) {
          return Leg::Detected;
        }
        if (ticks_ % cfg_.nav.scan_every == 0) {
          for (std::size_t j = i + 1; j < path.waypoints.size(); ++j) {
            if (is_blocked(path.waypoints[j])) return Leg::Blocked;
          }
          if (stale && stale()) return Leg::Stale;
        }
      }
    }
    if (final_yaw) {
      while (!flight_.turn_toward(*final_yaw)) {
        if (out_of_time()) return Leg::Timeout;
      }
    }
    return Leg::Arrived;
  }

 private:
  Flight& flight_;
  const WorldModel& world_;
  const FrontierConfig& cfg_;
  ExplorationMap map_;
  ByteRaster blocked_;
  std::mt19937_64 rng_;
  std::vector<DoorDetection> detections_;
  std::optional<DoorDetection> detection_;
  long ticks_ = 0;
};

}  // namespace

DeliveryOutcome frontier_explore_to_door(Flight& flight, const WorldModel& world, const FrontierConfig& config,
                                         ExplorationMap* final_map) {
  Explorer ex(flight, world, config);
  DeliveryOutcome out;
  const auto finish = [&](DeliveryStatus status) {
    out.status = status;
    out.elapsed = status == DeliveryStatus::Timeout ? config.time_cap : flight.time();
    out.trajectory = flight.trajectory();
    if (status == DeliveryStatus::Timeout) {
      // Cut the log at the cap.
      while (!out.trajectory.empty() && out.trajectory.back().t > config.time_cap + 1e-9) out.trajectory.pop_back();
    }
    out.detections = ex.detections();
    if (final_map) *final_map = ex.map();
    return out;
  };

  const Vec2 origin = flight.pose().xy();
  const GridFrame& f = ex.map().frame;
  std::set<std::pair<int, int>> rejected;
  ex.scan();
  bool found = ex.query();

  while (!found) {
    if (ex.out_of_time()) return finish(DeliveryStatus::Timeout);
    const std::vector<FrontierCluster> clusters = detect_frontiers(ex.map(), flight.pose().xy());
    std::optional<Path> route;
    Cell goal_cell(-1, -1);
    for (const FrontierCluster& cl : clusters) {
      // Goal: the admissible cluster cell nearest its centroid.
      Cell goal(-1, -1);
      double best = std::numeric_limits<double>::infinity();
      for (const Cell& c : cl.cells) {
        if (ex.blocked()(c.y(), c.x()) || rejected.count({c.x(), c.y()})) continue;
        if ((f.center(c) - origin).norm() > config.radius_cap) continue;
        const double d = (f.center(c) - cl.centroid).squaredNorm();
        if (d < best) {
          best = d;
          goal = c;
        }
      }
      if (goal.x() < 0) continue;
      const PlanResult plan = plan_path_blocked(f, ex.blocked(), flight.pose().xy(), f.center(goal), true);
      if (!plan.ok()) {
        rejected.insert({goal.x(), goal.y()});
        continue;
      }
      route = plan.path;
      goal_cell = goal;
      break;
    }
    if (!route) return finish(DeliveryStatus::DoorNotFound);

    const auto resolved = [&] {
      // The goal stops being a frontier once its neighborhood is known.
      if (ex.map().at(goal_cell) != CellState::Free) return true;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const Cell n(goal_cell.x() + dc, goal_cell.y() + dr);
          if (f.in_bounds(n) && ex.map().at(n) == CellState::Unknown) return false;
        }
      }
      return true;
    };
    const auto leg = ex.follow(*route, true, resolved, std::nullopt);
    if (leg == Explorer::Leg::Detected) found = true;
    if (leg == Explorer::Leg::Timeout) return finish(DeliveryStatus::Timeout);
    if (leg == Explorer::Leg::Arrived && !resolved()) rejected.insert({goal_cell.x(), goal_cell.y()});
  }

  const DoorDetection det = *ex.detection();
  const ApproachPoint ap = door_approach_point(det, config.nav.approach_offset, &f, &ex.blocked());
  out.approach_point = ap.point;
  out.approach_fallback = ap.fallback;
  const double face_door = heading_to(ap.point, det.door_point);
  for (int attempt = 0;; ++attempt) {
    if (attempt > config.nav.max_replans) return finish(DeliveryStatus::Stuck);
    if (ex.out_of_time()) return finish(DeliveryStatus::Timeout);
    const PlanResult plan = plan_path_blocked(f, ex.blocked(), flight.pose().xy(), ap.point, true);
    if (!plan.ok()) return finish(DeliveryStatus::Stuck);
    const auto leg = ex.follow(plan.path, false, nullptr, face_door);
    if (leg == Explorer::Leg::Timeout) return finish(DeliveryStatus::Timeout);
    if (leg == Explorer::Leg::Arrived) break;
    ++out.replans;
  }
  land(flight);
  if (flight.time() > config.time_cap + 1e-9) return finish(DeliveryStatus::Timeout);
  const bool there =
      (flight.pose().xy() - ap.point).norm() <= config.nav.land_tolerance && flight.pose().altitude <= 0.05;
  return finish(there ? DeliveryStatus::Delivered : DeliveryStatus::Stuck);
}

}  // namespace doorstep
