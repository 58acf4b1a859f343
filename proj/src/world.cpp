#include "doorstep/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace doorstep {

std::string_view to_string(DoorVisibility v) {
  switch (v) {
    case DoorVisibility::Open: return "open";
    case DoorVisibility::Recessed: return "recessed";
    case DoorVisibility::Enclosed: return "enclosed";
  }
  return "open";
}

DoorVisibility door_visibility_from_string(std::string_view s) {
  if (s == "open") return DoorVisibility::Open;
  if (s == "recessed") return DoorVisibility::Recessed;
  if (s == "enclosed") return DoorVisibility::Enclosed;
  throw std::invalid_argument("unknown door visibility '" + std::string(s) + "'");
}

ClassLabel WorldModel::class_at(const Vec2& p) const {
  if (!in_bounds(p)) return ClassLabel::Unknown;
  for (const auto& h : houses) {
    if (bounding_box(h.footprint).contains(p) && contains(h.footprint, p)) return ClassLabel::Roof;
  }
  for (const auto& r : regions) {
    if (bounding_box(r.polygon).contains(p) && contains(r.polygon, p)) return r.label;
  }
  return ClassLabel::Grass;
}

Side WorldModel::yard_side(const Vec2& p) const { return contains(front_yard, p) ? Side::Front : Side::Back; }

bool WorldModel::in_front_paved(const Vec2& p) const {
  return std::any_of(front_paved.begin(), front_paved.end(), [&](const Polygon& poly) { return contains(poly, p); });
}

double WorldModel::clearance_at(const Vec2& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : houses) best = std::min(best, distance_to_polygon(p, h.footprint));
  for (const auto& r : regions) {
    if (is_obstacle(r.label)) best = std::min(best, distance_to_polygon(p, r.polygon));
  }
  return best;
}

int WorldModel::house_at(const Vec2& p) const {
  for (std::size_t i = 0; i < houses.size(); ++i) {
    if (contains(houses[i].footprint, p)) return static_cast<int>(i);
  }
  return -1;
}

namespace {

double boundary_distance(const Vec2& p, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) best = std::min(best, distance_to_segment(p, poly[j], poly[i]));
  return best;
}

bool polygons_touch(const Polygon& a, const Polygon& b) {
  constexpr double tol = 1e-6;
  for (const auto& v : a) {
    if (boundary_distance(v, b) <= tol) return true;
  }
  for (const auto& v : b) {
    if (boundary_distance(v, a) <= tol) return true;
  }
  return false;
}

}  // namespace

void WorldModel::check_invariants() const {
  if (houses.empty() || !houses.front().recipient) throw std::logic_error("world has no recipient house");
  if (std::count_if(houses.begin(), houses.end(), [](const House& h) { return h.recipient; }) != 1) {
    throw std::logic_error("world must have exactly one recipient house");
  }

  std::vector<const Polygon*> all;
  for (const auto& h : houses) all.push_back(&h.footprint);
  for (const auto& r : regions) {
    if (r.label == ClassLabel::Grass || r.label == ClassLabel::Roof || r.label == ClassLabel::Unknown) {
      throw std::logic_error("region label must be paved or an obstacle class");
    }
    all.push_back(&r.polygon);
  }
  for (const Polygon* poly : all) {
    if (poly->size() < 3) throw std::logic_error("degenerate polygon");
    for (const auto& v : *poly) {
      if (v.x() < -1e-9 || v.y() < -1e-9 || v.x() > size.x() + 1e-9 || v.y() > size.y() + 1e-9) {
        throw std::logic_error("polygon vertex outside world bounds");
      }
    }
  }

  // Non-overlap: no sample point may fall in two polygons.
  std::vector<Box> boxes;
  for (const Polygon* poly : all) boxes.push_back(bounding_box(*poly));
  constexpr double step = 0.2;
  for (double y = step / 2; y < size.y(); y += step) {
    for (double x = step / 2; x < size.x(); x += step) {
      const Vec2 p(x, y);
      int hits = 0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (boxes[i].contains(p) && contains(*all[i], p)) ++hits;
      }
      if (hits > 1) {
        throw std::logic_error("region polygons overlap near (" + std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }

  // A chain of front-paved polygons must link the recipient footprint to the map edge.
  if (front_paved.empty()) throw std::logic_error("no front paved area");
  const auto touches_edge = [&](const Polygon& poly) {
    return std::any_of(poly.begin(), poly.end(), [&](const Vec2& v) {
      return std::abs(v.x()) < 1e-9 || std::abs(v.y()) < 1e-9 || std::abs(v.x() - size.x()) < 1e-9 ||
             std::abs(v.y() - size.y()) < 1e-9;
    });
  };
  std::vector<int> reached(front_paved.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < front_paved.size(); ++i) {
    if (polygons_touch(front_paved[i], recipient().footprint)) {
      reached[i] = 1;
      stack.push_back(i);
    }
  }
  bool linked = false;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (touches_edge(front_paved[i])) linked = true;
    for (std::size_t j = 0; j < front_paved.size(); ++j) {
      if (!reached[j] && polygons_touch(front_paved[i], front_paved[j])) {
        reached[j] = 1;
        stack.push_back(j);
      }
    }
  }
  if (!linked) throw std::logic_error("front paved area does not connect the house to the map edge");

  if (boundary_distance(door.center, recipient().footprint) > 1e-6) {
    throw std::logic_error("door is not on the recipient footprint");
  }
  if (std::abs(door.normal.norm() - 1.0) > 1e-9 || std::abs(front_direction.norm() - 1.0) > 1e-9) {
    throw std::logic_error("door normal / front direction must be unit vectors");
  }
  if (std::abs(area(front_yard) + area(back_yard) - size.x() * size.y()) > 1e-6) {
    throw std::logic_error("yard attribution halves must partition the world");
  }
  if (!in_bounds(start.xy()) || !(start.altitude > 0.0)) throw std::logic_error("start pose outside the world");
}

void GeneratorParams::validate() const {
  if (!(house_width_min > 0.0 && house_width_min < house_width_max)) throw std::invalid_argument("bad house width range");
  if (!(house_depth_min > 0.0 && house_depth_min < house_depth_max)) throw std::invalid_argument("bad house depth range");
  if (!(obstacle_density >= 0.0 && obstacle_density <= 1.0)) throw std::invalid_argument("obstacle density outside [0,1]");
  if (neighbor_count < 0 || neighbor_count > 2) throw std::invalid_argument("neighbor count must be 0, 1 or 2");
  if (!(gps_offset_sigma >= 0.0)) throw std::invalid_argument("gps offset sigma must be >= 0");
  if (!(altitude_min > 0.0 && altitude_min <= altitude_max)) throw std::invalid_argument("bad altitude range");
  if (!(world_size >= 40.0)) throw std::invalid_argument("world must be at least 40 m across");
  if (house_width_max > 14.0 || house_depth_max > 12.0) throw std::invalid_argument("houses too large for the lot layout");
}

namespace {

constexpr double kFenceHalf = 0.2;

class Layout {
 public:
  Layout(const GeneratorParams& params, std::uint64_t seed) : p_(params), rng_(seed), size_(params.world_size) {}

  WorldModel build();

 private:
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  int count(double mean) {
    const double base = std::floor(mean);
    return static_cast<int>(base) + (coin(mean - base) ? 1 : 0);
  }

  void add(ClassLabel label, const Polygon& poly, bool front_paved = false) {
    w_.regions.push_back({label, poly});
    taken_.push_back(bounding_box(poly));
    if (front_paved) w_.front_paved.push_back(poly);
  }
  void add_house(const Polygon& poly, bool recipient) {
    w_.houses.push_back({poly, recipient});
    taken_.push_back(bounding_box(poly));
  }
  bool free_box(const Box& b, double margin) const {
    const Box grown{b.min - Vec2::Constant(margin), b.max + Vec2::Constant(margin)};
    return std::none_of(taken_.begin(), taken_.end(), [&](const Box& t) {
      return grown.min.x() < t.max.x() && t.min.x() < grown.max.x() && grown.min.y() < t.max.y() &&
             t.min.y() < grown.max.y();
    });
  }
  // Scatter trees / beds in a rectangle, keeping clear of everything placed so far.
  void scatter(ClassLabel label, int n, double x0, double x1, double y0, double y1, double view_x, double view_half);

  void lot(double house_l, double house_r, double depth, double lot_l, double lot_r, bool recipient, int drive_side);

  const GeneratorParams& p_;
  std::mt19937_64 rng_;
  double size_;
  WorldModel w_;
  std::vector<Box> taken_;
  double road_ = 0.0;
  double driveway_l_ = 0.0;
  double driveway_r_ = 0.0;
  double facade_ = 0.0;
};

void Layout::scatter(ClassLabel label, int n, double x0, double x1, double y0, double y1, double view_x,
                     double view_half) {
  for (int i = 0; i < n; ++i) {
    for (int attempt = 0; attempt < 30; ++attempt) {
      Polygon poly;
      if (label == ClassLabel::Tree) {
        const double r = uniform(0.8, 1.6);
        if (x1 - x0 < 2 * r + 1.0 || y1 - y0 < 2 * r + 1.0) break;
        const Vec2 c(uniform(x0 + r + 0.5, x1 - r - 0.5), uniform(y0 + r + 0.5, y1 - r - 0.5));
        if (std::abs(c.x() - view_x) < view_half + r) continue;
        poly = regular_polygon(c, r, 8);
      } else {
        const double bw = uniform(1.5, 3.0);
        const double bh = uniform(1.0, 2.5);
        if (x1 - x0 < bw + 1.0 || y1 - y0 < bh + 1.0) break;
        const double bx = uniform(x0 + 0.5, x1 - 0.5 - bw);
        const double by = uniform(y0 + 0.5, y1 - 0.5 - bh);
        if (std::abs(bx + bw / 2 - view_x) < view_half + bw / 2) continue;
        poly = rectangle(bx, by, bx + bw, by + bh);
      }
      if (!free_box(bounding_box(poly), 0.6)) continue;
      add(label, poly);
      break;
    }
  }
}

// Driveway, optional car, side paths and clutter for one lot. The recipient's
// door and walkway are placed by build().
void Layout::lot(double house_l, double house_r, double depth, double lot_l, double lot_r, bool recipient,
                 int drive_side) {
  const double density = p_.obstacle_density;
  const double back = facade_ + depth;

  // Driveway at one end of the facade; a parked car splits it into paved strips.
  const double dw = std::min(uniform(3.0, 4.5), recipient ? (house_r - house_l) / 2 - 0.8 : 4.5);
  if (drive_side == 0) drive_side = coin() ? -1 : 1;
  const double dx0 = drive_side < 0 ? house_l + 0.8 : house_r - 0.8 - dw;
  const double dx1 = dx0 + dw;
  if (coin(0.3 + 0.6 * density)) {
    const double cx = dx0 + dw / 2;
    const double cy1 = facade_ - uniform(0.8, 1.5);
    const double cy0 = cy1 - 4.6;
    add(ClassLabel::Car, rectangle(cx - 0.95, cy0, cx + 0.95, cy1));
    add(ClassLabel::PavedArea, rectangle(dx0, road_, dx1, cy0), true);
    add(ClassLabel::PavedArea, rectangle(dx0, cy0, cx - 0.95, cy1), true);
    add(ClassLabel::PavedArea, rectangle(cx + 0.95, cy0, dx1, cy1), true);
    add(ClassLabel::PavedArea, rectangle(dx0, cy1, dx1, facade_), true);
  } else {
    add(ClassLabel::PavedArea, rectangle(dx0, road_, dx1, facade_), true);
  }
  if (recipient) {
    driveway_l_ = dx0;
    driveway_r_ = dx1;
  }

  // Side paths between the walls and the lot fences.
  if (house_l - (lot_l + kFenceHalf) > 0.3) add(ClassLabel::PavedArea, rectangle(std::max(0.0, lot_l + kFenceHalf), facade_, house_l, back));
  if ((lot_r - kFenceHalf) - house_r > 0.3) add(ClassLabel::PavedArea, rectangle(house_r, facade_, std::min(size_, lot_r - kFenceHalf), back));

  // Optional back patio (paved, touches the roof but not the image border).
  if (recipient && coin()) {
    const double pw = uniform(3.0, 5.0);
    const double pd = uniform(2.0, 3.0);
    const double mid = 0.5 * (house_l + house_r);
    add(ClassLabel::PavedArea, rectangle(mid - pw / 2, back, mid + pw / 2, back + pd));
  }
}

WorldModel Layout::build() {
  const Vec2 world(size_, size_);
  w_.size = world;
  road_ = uniform(5.0, 7.0);
  facade_ = road_ + uniform(8.0, 11.0);

  const double wh = uniform(p_.house_width_min, p_.house_width_max);
  const double dh = uniform(p_.house_depth_min, p_.house_depth_max);
  const double xc = size_ / 2 + uniform(-2.0, 2.0);
  const double hl = xc - wh / 2;
  const double hr = xc + wh / 2;
  const double hb = facade_ + dh;

  // Recipient house and door.
  Door door;
  door.visibility = p_.door_mode;
  door.normal = Vec2(0.0, -1.0);
  door.width = 1.0;
  std::optional<Box> alcove;
  // The door goes in one half of the facade and the driveway in the other.
  const bool door_left = coin();
  const auto mirror = [&](double x) { return door_left ? x : 2 * xc - x; };
  if (p_.door_mode == DoorVisibility::Open) {
    const double xd = mirror(uniform(hl + 1.2, xc - 1.0));
    door.center = Vec2(xd, facade_);
    add_house(rectangle(hl, facade_, hr, hb), true);
  } else {
    const double aw = uniform(1.9, 2.3);
    const double ad = uniform(1.5, 2.0);
    const double xm = mirror(uniform(hl + 1.0 + aw / 2, xc - 0.5 - aw / 2));
    const double xa = xm - aw / 2;
    door.center = Vec2(xm, facade_ + ad);
    add_house({Vec2(hl, facade_), Vec2(xa, facade_), Vec2(xa, facade_ + ad), Vec2(xa + aw, facade_ + ad),
               Vec2(xa + aw, facade_), Vec2(hr, facade_), Vec2(hr, hb), Vec2(hl, hb)},
              true);
    alcove = Box{Vec2(xa, facade_), Vec2(xa + aw, facade_ + ad)};
  }

  // Lots and fences.
  const double gl = uniform(2.8, 3.6);
  const double gr = uniform(2.8, 3.6);
  const double xl = hl - gl;
  const double xr = hr + gr;

  struct LotSpec {
    double house_l, house_r, depth, lot_l, lot_r;
  };
  std::vector<LotSpec> lots{{hl, hr, dh, xl, xr}};
  bool left = p_.neighbor_count >= 1;
  bool right = p_.neighbor_count >= 2;
  if (p_.neighbor_count == 1 && coin()) std::swap(left, right);
  double band = dh;
  if (left) {
    const double g = uniform(2.8, 3.6);
    const double r = xl - g;
    const double wn = std::min(uniform(p_.house_width_min, p_.house_width_max), r - 1.0);
    const double dn = uniform(p_.house_depth_min, p_.house_depth_max);
    const double l = r - wn;
    lots.push_back({l, r, dn, l - uniform(2.8, 3.6), xl});
    band = std::max(band, dn);
  }
  if (right) {
    const double g = uniform(2.8, 3.6);
    const double l = xr + g;
    const double wn = std::min(uniform(p_.house_width_min, p_.house_width_max), size_ - 1.0 - l);
    const double dn = uniform(p_.house_depth_min, p_.house_depth_max);
    const double r = l + wn;
    lots.push_back({l, r, dn, xr, r + uniform(2.8, 3.6)});
    band = std::max(band, dn);
  }
  for (std::size_t i = 1; i < lots.size(); ++i) {
    add_house(rectangle(lots[i].house_l, facade_, lots[i].house_r, facade_ + lots[i].depth), false);
  }

  add(ClassLabel::PavedArea, rectangle(0.0, 0.0, size_, road_), true);

  for (std::size_t i = 0; i < lots.size(); ++i) {
    lot(lots[i].house_l, lots[i].house_r, lots[i].depth, lots[i].lot_l, lots[i].lot_r, i == 0,
        i == 0 ? (door_left ? 1 : -1) : 0);
  }

  // Fences on lot boundaries run from the facade line to the back edge.
  std::vector<double> fences{xl, xr};
  double outer_l = xl;
  double outer_r = xr;
  for (std::size_t i = 1; i < lots.size(); ++i) {
    outer_l = std::min(outer_l, lots[i].lot_l);
    outer_r = std::max(outer_r, lots[i].lot_r);
  }
  if (outer_l != xl && outer_l > kFenceHalf) fences.push_back(outer_l);
  if (outer_r != xr && outer_r < size_ - kFenceHalf) fences.push_back(outer_r);
  for (double x : fences) add(ClassLabel::Fence, rectangle(x - kFenceHalf, facade_, x + kFenceHalf, size_));

  // Lanes beside the outermost lots, across the house band.
  if (outer_l - kFenceHalf > 0.3) add(ClassLabel::PavedArea, rectangle(0.0, facade_, outer_l - kFenceHalf, facade_ + band));
  if (size_ - (outer_r + kFenceHalf) > 0.3) add(ClassLabel::PavedArea, rectangle(outer_r + kFenceHalf, facade_, size_, facade_ + band));

  // Porch, walkway and the enclosed-door screen.
  const double xd = door.center.x();
  const double walk_end = p_.door_mode == DoorVisibility::Enclosed ? facade_ - 0.3 : facade_;
  if (alcove) add(ClassLabel::PavedArea, rectangle(alcove->min.x(), alcove->min.y(), alcove->max.x(), alcove->max.y()), true);
  if (p_.door_mode == DoorVisibility::Enclosed) {
    add(ClassLabel::Fence, rectangle(alcove->min.x(), facade_ - 0.3, alcove->max.x(), facade_));
  }
  const double ww = 1.4;
  if (xd + ww / 2 + 0.3 < driveway_l_ || xd - ww / 2 - 0.3 > driveway_r_) {
    add(ClassLabel::PavedArea, rectangle(xd - ww / 2, road_, xd + ww / 2, walk_end), true);
  }

  // Front hedges on lot boundaries.
  for (double x : {xl, xr}) {
    if (coin(p_.obstacle_density)) {
      const Box b{Vec2(x - 0.4, road_ + 1.5), Vec2(x + 0.4, facade_ - 1.0)};
      if (free_box(b, 0.1)) add(ClassLabel::Vegetation, rectangle(b.min.x(), b.min.y(), b.max.x(), b.max.y()));
    }
  }

  // Clutter: trees in front yards (kept out of the recipient door's view
  // corridor), trees and beds in back yards.
  const double density = p_.obstacle_density;
  for (std::size_t i = 0; i < lots.size(); ++i) {
    const auto& l = lots[i];
    const double view_half = i == 0 ? 2.0 : -1e9;
    scatter(ClassLabel::Tree, count(3.0 * density), std::max(0.0, l.lot_l + kFenceHalf), std::min(size_, l.lot_r - kFenceHalf),
            road_, facade_ - 0.5, i == 0 ? xd : 0.0, view_half);
    const double yb = facade_ + std::max(l.depth, band) + 0.5;
    scatter(ClassLabel::Tree, count(3.0 * density), std::max(0.0, l.lot_l + kFenceHalf), std::min(size_, l.lot_r - kFenceHalf),
            yb, size_, 0.0, -1e9);
    scatter(ClassLabel::Vegetation, count(2.0 * density), std::max(0.0, l.lot_l + kFenceHalf),
            std::min(size_, l.lot_r - kFenceHalf), yb, size_, 0.0, -1e9);
  }

  const double y_mid = facade_ + dh / 2;
  w_.front_yard = rectangle(0.0, 0.0, size_, y_mid);
  w_.back_yard = rectangle(0.0, y_mid, size_, size_);
  w_.front_direction = Vec2(0.0, -1.0);
  w_.door = door;

  std::normal_distribution<double> gps(0.0, 1.0);
  const double ox = p_.gps_offset_sigma * gps(rng_);
  const double oy = p_.gps_offset_sigma * gps(rng_);
  w_.start.x = xc + ox;
  w_.start.y = y_mid + oy;
  w_.start.altitude = uniform(p_.altitude_min, p_.altitude_max);
  w_.start.yaw = normalize_angle(uniform(-std::numbers::pi, std::numbers::pi));

  // Face a random edge.
  const int turns = static_cast<int>(rng_() % 4);
  const Vec2 pivot = world / 2;
  const auto turn = [&](Polygon& poly) {
    for (auto& v : poly) v = rotate_quarter(v, turns, pivot);
  };
  for (auto& h : w_.houses) turn(h.footprint);
  for (auto& r : w_.regions) turn(r.polygon);
  for (auto& poly : w_.front_paved) turn(poly);
  turn(w_.front_yard);
  turn(w_.back_yard);
  w_.door.center = rotate_quarter(w_.door.center, turns, pivot);
  w_.door.normal = rotate_quarter(w_.door.normal, turns, Vec2::Zero());
  w_.front_direction = rotate_quarter(w_.front_direction, turns, Vec2::Zero());
  const Vec2 s = rotate_quarter(w_.start.xy(), turns, pivot);
  w_.start.x = s.x();
  w_.start.y = s.y();
  w_.start.yaw = normalize_angle(w_.start.yaw + turns * std::numbers::pi / 2);
  return w_;
}

}  // namespace

WorldModel generate_world(const GeneratorParams& params) {
  params.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32)};
  std::mt19937_64 seeder(seq);
  std::string last_error;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Layout layout(params, seeder());
    WorldModel world = layout.build();
    world.seed = params.seed;
    try {
      world.check_invariants();
      return world;
    } catch (const std::logic_error& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error("world generation retries exhausted: " + last_error);
}

}  // namespace doorstep
