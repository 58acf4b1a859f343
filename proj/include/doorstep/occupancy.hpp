#pragma once

#include "doorstep/camera.hpp"
#include "doorstep/semantics.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace doorstep {

/// Binary traversability raster registered to world coordinates.
struct OccupancyGrid {
  GridFrame frame;
  ByteRaster occupied;  // 1 occupied, 0 free; rows = frame.height

  int width() const { return frame.width; }
  int height() const { return frame.height; }
  bool in_bounds(const Cell& c) const { return frame.in_bounds(c); }
  bool is_occupied(const Cell& c) const { return occupied(c.y(), c.x()) != 0; }
};

/// Roof and obstacle pixels are occupied, paved and grass free, Unknown
/// occupied. Cell size h / fx; cell (0,0) sits at capture_xy + backproject(0,0).
/// Requires square pixels (fx == fy).
OccupancyGrid build_occupancy(const SemanticGrid& grid, const CameraModel& cam, double h_capture,
                              const Vec2& capture_xy = Vec2::Zero());

struct Path {
  std::vector<Vec2> waypoints;
  double total_length = 0.0;

  bool empty() const { return waypoints.empty(); }
};

double path_length(const std::vector<Vec2>& waypoints);
Path make_path(std::vector<Vec2> waypoints);

enum class PlanStatus : std::uint8_t { Ok, Unreachable, StartOccupied, GoalOccupied };
std::string_view to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::Unreachable;
  Path path;
  // Exact grid cost: straight + diagonal * sqrt(2) cell steps.
  long straight = 0;
  long diagonal = 0;

  bool ok() const { return status == PlanStatus::Ok; }
  double cost() const;  // in cells
};

/// Cells within `inflation` meters (center to center) of an occupied cell.
ByteRaster inflate(const OccupancyGrid& occ, double inflation);

/// A* over 8-connected cells of the inflated grid, octile heuristic, diagonal
/// cost sqrt(2), no corner cutting. Waypoints: start point, cell centers, goal
/// point. Start / goal off the grid count as occupied.
PlanResult plan_path(const OccupancyGrid& occ, const Vec2& start, const Vec2& goal, double inflation = 0.5);

/// Same search on a precomputed blocked raster (1 = blocked). With
/// `free_start`, a blocked start cell is allowed (leaving an inflated margin).
PlanResult plan_path_blocked(const GridFrame& frame, const ByteRaster& blocked, const Vec2& start, const Vec2& goal,
                             bool free_start = false);

class NoRingExists : public std::runtime_error {
 public:
  NoRingExists() : std::runtime_error("no free band around the roof at the requested standoff") {}
};

/// Loop of free cells at distance [standoff, standoff + cell) from the roof
/// pixels, ordered by tracing the outer boundary of the standoff band. Cells
/// that are occupied or within `inflation` of an obstacle are cut out; if that
/// opens the loop, the longest remaining arc is returned. With `near`, the
/// path starts at the ring cell closest to it and heads in the direction that
/// turns least from `heading`; a closed loop ends where it started, an open arc
/// started mid-way runs to one end and then back to the other.
Path extract_footprint_ring(const OccupancyGrid& occ, const Segment& roof, double standoff = 1.5,
                            double inflation = 0.5, std::optional<Vec2> near = std::nullopt,
                            std::optional<double> heading = std::nullopt);

/// The whole traced loop with every usable cell kept, in loop order, even when
/// obstacles cut it into several arcs. Consecutive waypoints may then be far
/// apart; the door search plans across those gaps.
Path footprint_search_loop(const OccupancyGrid& occ, const Segment& roof, double standoff = 1.5,
                           double inflation = 0.5, std::optional<Vec2> near = std::nullopt,
                           std::optional<double> heading = std::nullopt);

/// Codes '#' occupied, '.' free; header "W H resolution ox oy".
void write_ascii(std::ostream& out, const OccupancyGrid& occ);
OccupancyGrid read_occupancy_ascii(std::istream& in);  // throws std::runtime_error

}  // namespace doorstep
