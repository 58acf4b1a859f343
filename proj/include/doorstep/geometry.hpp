#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <vector>

namespace doorstep {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Cell = Eigen::Vector2i;  // (col, row)

/// Simple (non self-intersecting) polygon, vertices in order, implicitly closed.
using Polygon = std::vector<Vec2>;

struct Box {
  Vec2 min{0.0, 0.0};
  Vec2 max{0.0, 0.0};

  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
  bool overlaps(const Box& o) const {
    return min.x() <= o.max.x() && o.min.x() <= max.x() && min.y() <= o.max.y() && o.min.y() <= max.y();
  }
};

Box bounding_box(const Polygon& poly);

/// Crossing-number test. Points exactly on the lower/left edges count as inside,
/// on the upper/right edges as outside, so rectangles sharing an edge never both
/// claim a point.
bool contains(const Polygon& poly, const Vec2& p);

double signed_area(const Polygon& poly);
double area(const Polygon& poly);
Vec2 centroid(const Polygon& poly);

Polygon rectangle(double x0, double y0, double x1, double y1);
Polygon regular_polygon(const Vec2& center, double radius, int sides);

/// Proper or touching intersection of segments ab and cd.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// True if segment ab passes through the polygon: crosses an edge or has an
/// endpoint inside.
bool segment_hits_polygon(const Vec2& a, const Vec2& b, const Polygon& poly);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// 0 inside, otherwise distance to the nearest edge.
double distance_to_polygon(const Vec2& p, const Polygon& poly);

/// Metric frame of a raster: cell (c, r) is centered at origin + resolution * (c, r).
struct GridFrame {
  Vec2 origin = Vec2::Zero();
  double resolution = 1.0;
  int width = 0;
  int height = 0;

  bool in_bounds(const Cell& c) const { return c.x() >= 0 && c.y() >= 0 && c.x() < width && c.y() < height; }
  Vec2 center(const Cell& c) const { return origin + resolution * c.cast<double>(); }
  Cell cell_of(const Vec2& p) const {
    const Vec2 q = (p - origin) / resolution;
    return Cell(static_cast<int>(std::lround(q.x())), static_cast<int>(std::lround(q.y())));
  }
  std::size_t index(const Cell& c) const { return static_cast<std::size_t>(c.y()) * width + c.x(); }
};

/// Rotate a point by k quarter turns (counter-clockwise in a y-up frame) about `pivot`.
Vec2 rotate_quarter(const Vec2& p, int k, const Vec2& pivot);

}  // namespace doorstep
