#include "doorstep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace doorstep {

Box bounding_box(const Polygon& poly) {
  Box box;
  if (poly.empty()) return box;
  box.min = poly.front();
  box.max = poly.front();
  for (const auto& v : poly) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

bool contains(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double signed_area(const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    s += poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
  }
  return 0.5 * s;
}

double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

Vec2 centroid(const Polygon& poly) {
  const double a = signed_area(poly);
  if (a == 0.0) {
    Vec2 m = Vec2::Zero();
    for (const auto& v : poly) m += v;
    return poly.empty() ? m : Vec2(m / static_cast<double>(poly.size()));
  }
  Vec2 c = Vec2::Zero();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double cross = poly[j].x() * poly[i].y() - poly[i].x() * poly[j].y();
    c += (poly[j] + poly[i]) * cross;
  }
  return c / (6.0 * a);
}

Polygon rectangle(double x0, double y0, double x1, double y1) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

Polygon regular_polygon(const Vec2& center, double radius, int sides) {
  Polygon poly;
  poly.reserve(static_cast<std::size_t>(sides));
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * std::numbers::pi * i / sides;
    poly.emplace_back(center + radius * Vec2(std::cos(a), std::sin(a)));
  }
  return poly;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

}  // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

bool segment_hits_polygon(const Vec2& a, const Vec2& b, const Polygon& poly) {
  Box seg{a.cwiseMin(b), a.cwiseMax(b)};
  if (!seg.overlaps(bounding_box(poly))) return false;
  if (contains(poly, a) || contains(poly, b)) return true;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (segments_intersect(a, b, poly[j], poly[i])) return true;
  }
  return false;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double distance_to_polygon(const Vec2& p, const Polygon& poly) {
  if (contains(poly, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    best = std::min(best, distance_to_segment(p, poly[j], poly[i]));
  }
  return best;
}

Vec2 rotate_quarter(const Vec2& p, int k, const Vec2& pivot) {
  Vec2 d = p - pivot;
  k = ((k % 4) + 4) % 4;
  for (int i = 0; i < k; ++i) d = Vec2(-d.y(), d.x());
  return pivot + d;
}

}  // namespace doorstep
