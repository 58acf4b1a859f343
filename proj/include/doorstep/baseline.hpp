#pragma once

#include "doorstep/flight.hpp"
#include "doorstep/navigation.hpp"
#include "doorstep/world.hpp"

#include <optional>
#include <random>
#include <vector>

namespace doorstep {

enum class CellState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// Map built only from the drone's own scans. Cells start Unknown and change
/// only when observed.
struct ExplorationMap {
  GridFrame frame;
  ByteRaster cells;

  ExplorationMap() = default;
  ExplorationMap(const GridFrame& f) : frame(f), cells(ByteRaster::Zero(f.height, f.width)) {}
  /// Cells of size `resolution` tiling [0, size.x) x [0, size.y).
  static ExplorationMap covering(const Vec2& size, double resolution);

  CellState at(const Cell& c) const { return static_cast<CellState>(cells(c.y(), c.x())); }
  void set(const Cell& c, CellState s) { cells(c.y(), c.x()) = static_cast<std::uint8_t>(s); }
  /// Fold in one scan: free only overwrites Unknown, occupied always wins.
  void observe(const ScanResult& scan);
  std::size_t count(CellState s) const;
};

struct FrontierCluster {
  std::vector<Cell> cells;  // row-major order
  Vec2 centroid = Vec2::Zero();  // world, m
  double distance = 0.0;         // centroid to drone
};

/// Free cells with an Unknown 8-neighbor, grouped 8-connected, nearest
/// centroid first (ties: first cell in row-major order).
std::vector<FrontierCluster> detect_frontiers(const ExplorationMap& map, const Vec2& drone);

struct FrontierConfig {
  NavigationConfig nav;          // detector, inflation, approach, scans
  double radius_cap = 25.0;      // m from the descent point
  double time_cap = 180.0;       // s on the flight clock
  double resolution = 0.25;      // m per map cell
  double scan_fov = std::numbers::pi / 2;
  double spot_radius = 15.0;     // descent spot within this of the house center
  double clearance = 2.5;
  double hover_height = 2.0;
};

/// Seeded uniform draw over free, clear points on the house's front side.
Vec2 random_front_spot(const WorldModel& world, double clearance, double radius, std::mt19937_64& rng);

/// Lateral flight at the current altitude to above `spot`, then descent to hover.
void descend_at(Flight& flight, const Vec2& spot, double hover_height);

/// Nearest-frontier exploration from the current hover pose until the door is
/// seen (then approach and land), the clock reaches time_cap (Timeout, elapsed
/// reported as time_cap) or no admissible frontier is left (DoorNotFound).
DeliveryOutcome frontier_explore_to_door(Flight& flight, const WorldModel& world, const FrontierConfig& config,
                                         ExplorationMap* final_map = nullptr);

}  // namespace doorstep
