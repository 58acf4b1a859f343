#pragma once

#include "doorstep/flight.hpp"
#include "doorstep/occupancy.hpp"
#include "doorstep/sensors.hpp"
#include "doorstep/world.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace doorstep {

enum class DeliveryStatus : std::uint8_t { Delivered, DoorNotFound, Timeout, Stuck };
std::string_view to_string(DeliveryStatus s);

struct NavigationConfig {
  DetectorParams detector;
  double yaw_step = std::numbers::pi / 16;
  double yaw_range = std::numbers::pi / 4;
  double approach_offset = 1.0;
  double standoff = 1.5;
  double inflation = 0.5;
  double scan_radius = 6.0;
  int scan_every = 5;        // ticks between local scans
  int max_replans = 5;       // consecutive failed re-plans before giving up
  double time_cap = 300.0;   // s on the flight clock
  double land_tolerance = 0.2;
  std::uint64_t seed = 0;    // detector misses, if enabled
};

struct DeliveryOutcome {
  DeliveryStatus status = DeliveryStatus::DoorNotFound;
  double elapsed = 0.0;
  std::vector<TimedPose> trajectory;
  std::vector<DoorDetection> detections;
  Vec2 approach_point = Vec2::Zero();
  bool approach_fallback = false;
  int queries_before_footprint = 0;
  int replans = 0;
};

/// Mutable per-trial search state shared by the stages below: the aerial map
/// with sensed obstacles painted in, detector bookkeeping and the clock cap.
class NavigationContext {
 public:
  NavigationContext(Flight& flight, const WorldModel& world, const OccupancyGrid& occ, const NavigationConfig& config);

  Flight& flight() { return flight_; }
  const WorldModel& world() const { return world_; }
  const OccupancyGrid& map() const { return overlay_; }
  const ByteRaster& blocked() const { return blocked_; }
  const NavigationConfig& config() const { return config_; }

  std::optional<DoorDetection> query();
  int queries() const { return queries_; }
  const std::vector<DoorDetection>& detections() const { return detections_; }

  /// Scan around the drone and paint new occupied cells; returns them.
  std::vector<Cell> sense();
  /// Paint cells into the overlay (and its inflation). Returns how many were new.
  int paint(const std::vector<Cell>& cells);

  bool out_of_time() const { return flight_.time() >= config_.time_cap - 1e-9; }

 private:
  Flight& flight_;
  const WorldModel& world_;
  OccupancyGrid overlay_;
  ByteRaster blocked_;
  NavigationConfig config_;
  std::mt19937_64 rng_;
  int queries_ = 0;
  std::vector<DoorDetection> detections_;
};

/// Turns through yaw offsets 0, -step, ..., -range, then +step, ..., +range
/// about the starting heading, querying the detector at each; first hit wins.
std::optional<DoorDetection> yaw_sweep_search(NavigationContext& ctx);

struct SearchResult {
  std::optional<DoorDetection> detection;
  bool stuck = false;
  bool timed_out = false;
};

/// Flies the ring once, facing the house, querying every tick and re-planning
/// around sensed obstacles; stops at the first detection.
SearchResult follow_footprint_search(NavigationContext& ctx, const Path& ring, const std::vector<Vec2>& roof_points);

/// Unchanged path when no sensed cell lies within `inflation` of the remaining
/// route; otherwise re-plans from `position` to the path's goal on `occ` with
/// the sensed cells added.
PlanResult dynamic_replan(const Path& current, const std::vector<Cell>& sensed, const OccupancyGrid& occ,
                          const Vec2& position, double inflation = 0.5);

struct ApproachPoint {
  Vec2 point = Vec2::Zero();
  bool fallback = false;
};

/// door_point + offset * normal; when that lands in a blocked cell of `blocked`,
/// the first free cell further out along the normal (flagged).
ApproachPoint door_approach_point(const DoorDetection& det, double offset = 1.0, const GridFrame* frame = nullptr,
                                  const ByteRaster* blocked = nullptr);

/// Detector check and yaw sweep, footprint ring search, then approach and land.
/// `roof` is the recipient roof segment in the capture that produced `occ`.
DeliveryOutcome deliver_to_front_door(Flight& flight, const WorldModel& world, const OccupancyGrid& occ,
                                      const Segment& roof, const NavigationConfig& config = {});

/// Plan-and-fly to `goal` at the current altitude with periodic scans and
/// re-planning; the door is not queried. Returns false on a failed plan or time out.
bool fly_to(NavigationContext& ctx, const Vec2& goal, std::optional<double> final_yaw, int& replans);

/// Straight descent to the ground at the current position.
void land(Flight& flight);

}  // namespace doorstep
