#include "doorstep/descent.hpp"

#include "doorstep/distance_transform.hpp"
#include "doorstep/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <tuple>

namespace doorstep {

std::string_view to_string(DeliveryTarget t) {
  switch (t) {
    case DeliveryTarget::FrontDoor: return "front_door";
    case DeliveryTarget::FrontPavedArea: return "front_paved_area";
    case DeliveryTarget::BackYard: return "back_yard";
    case DeliveryTarget::FrontYard: return "front_yard";
  }
  return "front_door";
}

std::string_view to_string(DescentRegion r) {
  switch (r) {
    case DescentRegion::FrontPavedArea: return "front_paved_area";
    case DescentRegion::BackYard: return "back_yard";
    case DescentRegion::FrontYard: return "front_yard";
  }
  return "front_paved_area";
}

std::string_view to_string(DescentStatus s) {
  switch (s) {
    case DescentStatus::Success: return "success";
    case DescentStatus::NoRoofVisible: return "no_roof_visible";
    case DescentStatus::NoFrontPavedArea: return "no_front_paved_area";
    case DescentStatus::NoSafeSpot: return "no_safe_spot";
    case DescentStatus::WrongRoof: return "wrong_roof";
  }
  return "success";
}

DeliveryTarget delivery_target_from_string(std::string_view s) {
  for (auto t : {DeliveryTarget::FrontDoor, DeliveryTarget::FrontPavedArea, DeliveryTarget::BackYard,
                 DeliveryTarget::FrontYard}) {
    if (s == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown delivery target '" + std::string(s) + "'");
}

std::size_t identify_recipient_roof(const std::vector<Segment>& roofs, const Vec2& p_drone) {
  if (roofs.empty()) throw DescentError(DescentStatus::NoRoofVisible, "no roof segment in the aerial image");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roofs.size(); ++i) {
    const double d = (roofs[i].centroid - p_drone).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

HouseOrientation estimate_house_orientation(const Segment& roof, const std::vector<Segment>& paved) {
  if (roof.pixels.empty()) throw std::invalid_argument("roof segment is empty");
  // Roof membership over its bounding box grown by one pixel.
  Cell lo = roof.pixels.front();
  Cell hi = lo;
  for (const auto& p : roof.pixels) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo -= Cell(1, 1);
  hi += Cell(1, 1);
  const int w = hi.x() - lo.x() + 1;
  const int h = hi.y() - lo.y() + 1;
  std::vector<std::uint8_t> is_roof(static_cast<std::size_t>(w) * h, 0);
  for (const auto& p : roof.pixels) is_roof[static_cast<std::size_t>(p.y() - lo.y()) * w + (p.x() - lo.x())] = 1;
  const auto roof_at = [&](int c, int r) {
    if (c < lo.x() || r < lo.y() || c > hi.x() || r > hi.y()) return false;
    return is_roof[static_cast<std::size_t>(r - lo.y()) * w + (c - lo.x())] != 0;
  };
  const auto adjacent = [&](const Segment& s) {
    for (const auto& p : s.pixels) {
      if (p.x() < lo.x() || p.y() < lo.y() || p.x() > hi.x() || p.y() > hi.y()) continue;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr != 0 || dc != 0) && roof_at(p.x() + dc, p.y() + dr)) return true;
        }
      }
    }
    return false;
  };

  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < paved.size(); ++i) {
    if (!paved[i].touches_image_boundary || !adjacent(paved[i])) continue;
    if (!pick || paved[i].area() > paved[*pick].area()) pick = i;
  }
  if (!pick) {
    throw DescentError(DescentStatus::NoFrontPavedArea, "no paved segment touches both the roof and the image border");
  }
  return HouseOrientation{roof.centroid - paved[*pick].centroid, *pick};
}

DescentRegion select_descent_region(DeliveryTarget target) {
  switch (target) {
    case DeliveryTarget::FrontDoor:
    case DeliveryTarget::FrontPavedArea: return DescentRegion::FrontPavedArea;
    case DeliveryTarget::BackYard: return DescentRegion::BackYard;
    case DeliveryTarget::FrontYard: return DescentRegion::FrontYard;
  }
  return DescentRegion::FrontPavedArea;
}

bool region_matches(ClassLabel label, Side side, DescentRegion region) {
  switch (region) {
    case DescentRegion::FrontPavedArea: return label == ClassLabel::PavedArea;
    case DescentRegion::BackYard: return label == ClassLabel::Grass && side == Side::Back;
    case DescentRegion::FrontYard: return label == ClassLabel::Grass && side == Side::Front;
  }
  return false;
}

bool is_over_descent_region(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region) {
  const Cell c = grid.drone_pixel();
  return region_matches(grid.at(c), mask.at(c), region);
}

std::optional<Cell> find_safe_descent_point(const SemanticGrid& grid, const ByteRaster& allowed, const CameraModel& cam,
                                            double h_drone, double clearance) {
  if (!(h_drone > 0.0)) throw std::invalid_argument("safe-spot search needs a positive height");
  if (allowed.rows() != grid.height() || allowed.cols() != grid.width()) {
    throw std::invalid_argument("region raster does not match the grid");
  }
  const double sx = h_drone / cam.fx;
  const double sy = h_drone / cam.fy;
  const double sx2 = sx * sx;
  const double sy2 = sy * sy;
  const double need = clearance * clearance;

  ByteRaster sources(grid.height(), grid.width());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) sources(r, c) = is_clearance_source(grid.at(c, r)) ? 1 : 0;
  }
  const DistanceRaster d2 = squared_distance_transform(sources, sx2, sy2);

  const Vec2 p = grid.drone_point();
  const Cell center = grid.drone_pixel();
  const auto metric = [&](int c, int r) {
    const double dx = c - p.x();
    const double dy = r - p.y();
    return sy2 * dy * dy + sx2 * dx * dx;
  };

  std::optional<Cell> best;
  std::tuple<double, int, int> best_key{std::numeric_limits<double>::infinity(), 0, 0};
  const auto consider = [&](int c, int r) {
    if (!grid.in_bounds(c, r) || !allowed(r, c) || !(d2(r, c) >= need)) return;
    const std::tuple<double, int, int> key{metric(c, r), r, c};
    if (key < best_key) {
      best_key = key;
      best = Cell(c, r);
    }
  };
  const int max_ring = std::max({center.x(), center.y(), grid.width() - 1 - center.x(), grid.height() - 1 - center.y()});
  const double smin2 = std::min(sx2, sy2);
  for (int k = 0; k <= max_ring; ++k) {
    if (best) {
      // Nothing on ring k can beat the current best.
      const double lb = std::max(0.0, k - 0.5);
      if (lb * lb * smin2 > std::get<0>(best_key)) break;
    }
    if (k == 0) {
      consider(center.x(), center.y());
      continue;
    }
    for (int c = center.x() - k; c <= center.x() + k; ++c) {
      consider(c, center.y() - k);
      consider(c, center.y() + k);
    }
    for (int r = center.y() - k + 1; r <= center.y() + k - 1; ++r) {
      consider(center.x() - k, r);
      consider(center.x() + k, r);
    }
  }
  return best;
}

ByteRaster descent_region_pixels(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region) {
  ByteRaster out = ByteRaster::Zero(grid.height(), grid.width());
  if (region != DescentRegion::FrontPavedArea) {
    const Side want = region == DescentRegion::BackYard ? Side::Back : Side::Front;
    for (int r = 0; r < grid.height(); ++r) {
      for (int c = 0; c < grid.width(); ++c) out(r, c) = mask.at(c, r) == want ? 1 : 0;
    }
    return out;
  }
  const Cell start = grid.drone_pixel();
  if (grid.at(start) != ClassLabel::PavedArea) {
    for (int r = 0; r < grid.height(); ++r) {
      for (int c = 0; c < grid.width(); ++c) out(r, c) = grid.at(c, r) == ClassLabel::PavedArea ? 1 : 0;
    }
    return out;
  }
  std::deque<Cell> queue{start};
  out(start.y(), start.x()) = 1;
  const Cell steps[4] = {Cell(1, 0), Cell(0, 1), Cell(-1, 0), Cell(0, -1)};
  while (!queue.empty()) {
    const Cell q = queue.front();
    queue.pop_front();
    for (const Cell& s : steps) {
      const Cell n = q + s;
      if (grid.in_bounds(n.x(), n.y()) && !out(n.y(), n.x()) && grid.at(n) == ClassLabel::PavedArea) {
        out(n.y(), n.x()) = 1;
        queue.push_back(n);
      }
    }
  }
  return out;
}

std::optional<Cell> find_safe_descent_point(const SemanticGrid& grid, const FrontBackMask& mask, DescentRegion region,
                                            const CameraModel& cam, double h_drone, double clearance) {
  return find_safe_descent_point(grid, descent_region_pixels(grid, mask, region), cam, h_drone, clearance);
}

namespace {

SemanticGrid capture(const WorldModel& world, const DronePose& pose, const CameraModel& cam,
                     const LabelNoiseModel& noise, long tick) {
  SemanticGrid g = render_aerial(world, pose, cam);
  if (noise.is_identity()) return g;
  LabelNoiseModel m = noise;
  m.seed = noise.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(tick + 1);
  return apply_label_noise(g, m);
}

}  // namespace

DescentOutcome run_descent(Flight& flight, const WorldModel& world, DeliveryTarget target, const CameraModel& cam,
                           const DescentConfig& config) {
  cam.validate();
  DescentOutcome out;
  out.region = select_descent_region(target);
  const auto finish = [&](DescentStatus status) {
    out.status = status;
    out.final_altitude = flight.pose().altitude;
    out.trajectory = flight.trajectory();
    return out;
  };

  const DronePose p0 = flight.pose();
  const double h0 = range_find(world, p0);
  const SemanticGrid grid0 = capture(world, p0, cam, config.noise, flight.ticks());
  flight.hold();  // the capture takes one control period
  const std::vector<Segment> roofs = connected_components(grid0, ClassLabel::Roof);
  const std::vector<Segment> paved = connected_components(grid0, ClassLabel::PavedArea);
  std::size_t roof_index = 0;
  HouseOrientation orientation;
  try {
    roof_index = identify_recipient_roof(roofs, grid0.drone_point());
    orientation = estimate_house_orientation(roofs[roof_index], paved);
  } catch (const DescentError& e) {
    out.initial_grid = grid0;
    return finish(e.status());
  }
  const Vec2 c_roof = roofs[roof_index].centroid;
  // c_roof - c_paved points into the house; the front faces the other way.
  const Vec2 front_dir = -orientation.v_front.normalized();
  out.initial_grid = grid0;
  out.initial_mask = classify_grass_front_back(grid0, c_roof, front_dir);
  out.c_roof_pixel = c_roof;
  out.front_dir = front_dir;

  Vec2 roof_world = pixel_to_world(c_roof, p0, cam);
  if (world.house_at(roof_world) != 0) return finish(DescentStatus::WrongRoof);

  // Centroid of the descent region in the first capture.
  Vec2 c_descend = Vec2::Zero();
  if (out.region == DescentRegion::FrontPavedArea) {
    c_descend = paved[orientation.paved_index].centroid;
  } else {
    const Side want = out.region == DescentRegion::BackYard ? Side::Back : Side::Front;
    double n = 0.0;
    for (int r = 0; r < grid0.height(); ++r) {
      for (int c = 0; c < grid0.width(); ++c) {
        if (out.initial_mask.at(c, r) == want) {
          c_descend += Vec2(c, r);
          n += 1.0;
        }
      }
    }
    if (n == 0.0) return finish(DescentStatus::NoSafeSpot);
    c_descend /= n;
  }
  const Vec2 descend_world = pixel_to_world(c_descend, p0, cam);

  // Lateral phase at capture altitude, re-capturing every control step.
  Vec2 dir = Vec2::Zero();
  try {
    const Vec2 m = motion_direction<double>(grid0.drone_point(), c_descend);
    dir = Vec2(m.x() * h0 / cam.fx, m.y() * h0 / cam.fy).normalized();
  } catch (const ZeroDisplacement&) {
  }
  const double reach = config.max_speed * flight.dt();
  double travelled = 0.0;
  SemanticGrid grid = grid0;
  for (bool first = true;; first = false) {
    const DronePose& p = flight.pose();
    if (!first) grid = capture(world, p, cam, config.noise, flight.ticks());
    const Cell center = grid.drone_pixel();
    const ClassLabel below = grid.at(center);
    Side side = Side::NotGrass;
    if (below == ClassLabel::Grass) {
      const Vec2 roof_px = ground_to_pixel(roof_world, p.xy(), cam, p.altitude);
      side = classify_point(center.cast<double>(), roof_px, front_dir);
    }
    if (region_matches(below, side, out.region)) break;
    if (dir.isZero() || travelled >= config.max_lateral || (descend_world - p.xy()).norm() <= reach) break;
    flight.step(VelocityCommand{Vec3(dir.x(), dir.y(), 0.0) * config.max_speed, 0.0});
    travelled += reach;
  }

  // Fresh capture over the region: re-find the roof, split the grass, search.
  const DronePose p1 = flight.pose();
  const double h1 = range_find(world, p1);
  const SemanticGrid grid1 = capture(world, p1, cam, config.noise, flight.ticks());
  const std::vector<Segment> roofs1 = connected_components(grid1, ClassLabel::Roof);
  Vec2 c_roof1 = ground_to_pixel(roof_world, p1.xy(), cam, h1);
  if (!roofs1.empty()) {
    const std::size_t i = identify_recipient_roof(roofs1, c_roof1);
    c_roof1 = roofs1[i].centroid;
    out.capture_roof = roofs1[i];
    roof_world = pixel_to_world(c_roof1, p1, cam);
  }
  const FrontBackMask mask1 = classify_grass_front_back(grid1, c_roof1, front_dir);
  out.capture_pose = p1;
  out.capture_grid = grid1;

  // A boundary point can lie up to one pixel diagonal from the nearest labeled pixel center.
  const double margin = config.pixel_margin ? std::hypot(h1 / cam.fx, h1 / cam.fy) : 0.0;
  const std::optional<Cell> spot =
      find_safe_descent_point(grid1, mask1, out.region, cam, h1, config.clearance + margin);
  if (!spot) return finish(DescentStatus::NoSafeSpot);
  out.descent_point = pixel_to_world(spot->cast<double>(), p1, cam);

  const Vec3 above(out.descent_point.x(), out.descent_point.y(), p1.altitude);
  while (!flight.step_toward(above)) {
  }
  const double facing = heading_to(out.descent_point, roof_world);
  const Vec3 hover(out.descent_point.x(), out.descent_point.y(), config.hover_height);
  while (!flight.step_toward(hover, facing)) {
  }
  return finish(DescentStatus::Success);
}

}  // namespace doorstep
