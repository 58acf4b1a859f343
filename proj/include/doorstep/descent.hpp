#pragma once

#include "doorstep/camera.hpp"
#include "doorstep/flight.hpp"
#include "doorstep/semantics.hpp"
#include "doorstep/world.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace doorstep {

enum class DeliveryTarget : std::uint8_t { FrontDoor, FrontPavedArea, BackYard, FrontYard };
enum class DescentRegion : std::uint8_t { FrontPavedArea, BackYard, FrontYard };
enum class DescentStatus : std::uint8_t { Success, NoRoofVisible, NoFrontPavedArea, NoSafeSpot, WrongRoof };

std::string_view to_string(DeliveryTarget t);
std::string_view to_string(DescentRegion r);
std::string_view to_string(DescentStatus s);
DeliveryTarget delivery_target_from_string(std::string_view s);  // throws std::invalid_argument

/// Pipeline failure carrying the status it maps to.
class DescentError : public std::runtime_error {
 public:
  DescentError(DescentStatus status, const std::string& what) : std::runtime_error(what), status_(status) {}
  DescentStatus status() const { return status_; }

 private:
  DescentStatus status_;
};

class ZeroDisplacement : public std::invalid_argument {
 public:
  ZeroDisplacement() : std::invalid_argument("drone is already at the descent-region centroid") {}
};

/// Index of the roof whose centroid is nearest p_drone; the first such segment on
/// ties. Throws DescentError(NoRoofVisible) for an empty list.
std::size_t identify_recipient_roof(const std::vector<Segment>& roofs, const Vec2& p_drone);

struct HouseOrientation {
  Vec2 v_front = Vec2::Zero();  // c_roof - c_paved
  std::size_t paved_index = 0;
};

/// Uses the paved segment that is 8-adjacent to the roof and reaches the image
/// border (largest such). Throws DescentError(NoFrontPavedArea) if none qualifies.
HouseOrientation estimate_house_orientation(const Segment& roof, const std::vector<Segment>& paved);

DescentRegion select_descent_region(DeliveryTarget target);

/// Unit vector from p_drone toward c_descend. Throws ZeroDisplacement.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> motion_direction(const Eigen::Matrix<Scalar, 2, 1>& p_drone,
                                             const Eigen::Matrix<Scalar, 2, 1>& c_descend) {
  const Eigen::Matrix<Scalar, 2, 1> d = c_descend - p_drone;
  const Scalar n = d.norm();
  if (!(n > Scalar(0))) throw ZeroDisplacement();
  return d / n;
}

/// Whether a pixel with this class / front-back side belongs to the region.
bool region_matches(ClassLabel label, Side side, DescentRegion region);

/// The center pixel's class (and side, for yards) matches the region.
bool is_over_descent_region(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region);

/// Nearest pixel to p_drone (metric, ground scale h/fx, h/fy) among the
/// `allowed` pixels whose distance to every roof / obstacle pixel is at least
/// `clearance`. Ties go to the lower row, then the lower column. Square rings
/// around the drone pixel are searched outward until no closer pixel can exist.
std::optional<Cell> find_safe_descent_point(const SemanticGrid& grid, const ByteRaster& allowed, const CameraModel& cam,
                                            double h_drone, double clearance = 2.5);

/// Region pixels: Front / Back grass for yards; for the paved region, the paved
/// component under the drone (all paved pixels when the drone is not over one).
ByteRaster descent_region_pixels(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region);

std::optional<Cell> find_safe_descent_point(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region,
                                            const CameraModel& cam, double h_drone, double clearance = 2.5);

struct DescentConfig {
  double clearance = 2.5;
  double hover_height = 2.0;
  double dt = 0.1;
  double max_speed = 0.5;
  double max_lateral = 40.0;  // give up the lateral phase after this many meters
  bool pixel_margin = true;   // widen the clearance by one pixel diagonal
  LabelNoiseModel noise;      // identity by default
};

struct DescentOutcome {
  DescentStatus status = DescentStatus::NoRoofVisible;
  DescentRegion region = DescentRegion::FrontPavedArea;
  Vec2 descent_point = Vec2::Zero();  // world, m
  double final_altitude = 0.0;
  std::vector<TimedPose> trajectory;

  // Percepts kept for scoring and for the door search that follows.
  SemanticGrid initial_grid;
  FrontBackMask initial_mask;
  Vec2 c_roof_pixel = Vec2::Zero();  // in initial_grid
  Vec2 front_dir = Vec2::Zero();     // image / world direction the house faces
  DronePose capture_pose;            // pose of the pre-descent capture
  SemanticGrid capture_grid;         // pre-descent capture, used for the occupancy map
  Segment capture_roof;              // recipient roof in capture_grid
};

/// Capture, roof selection, orientation, front/back split, lateral motion
/// until over the region, safe-spot search, move to it and descend to hover.
/// Ends at hover height; the final landing for yard / paved targets is left to
/// the caller. `world` is used only by the simulated camera and to flag a
/// neighbor's roof as WrongRoof.
DescentOutcome run_descent(Flight& flight, const WorldModel& world, DeliveryTarget target, const CameraModel& cam,
                           const DescentConfig& config = {});

/// Ground point under a (fractional) pixel of a capture taken at `pose`.
inline Vec2 pixel_to_world(const Vec2& pixel, const DronePose& pose, const CameraModel& cam) {
  return pose.xy() + pixel_to_ground_offset(pixel, cam, pose.altitude);
}

}  // namespace doorstep
