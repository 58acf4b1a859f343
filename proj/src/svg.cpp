#include "doorstep/harness.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace doorstep {

namespace {

constexpr double kScale = 10.0;  // px per meter

// Fill per class, indexed by ClassLabel.
constexpr std::array<const char*, kClassCount> kFill{
    "#c0392b",  // roof
    "#95a5a6",  // paved
    "#8bc34a",  // grass
    "#2e7d32",  // vegetation
    "#8d6e63",  // fence
    "#1e88e5",  // car
    "#33691e",  // tree
    "#000000",  // unknown
};

struct Canvas {
  double height;
  double x(double wx) const { return wx * kScale; }
  double y(double wy) const { return (height - wy) * kScale; }  // north up
};

void polygon(std::ostream& o, const Canvas& cv, const Polygon& poly, const char* fill, const char* extra = "") {
  o << "<polygon points=\"";
  for (std::size_t i = 0; i < poly.size(); ++i) o << (i ? " " : "") << cv.x(poly[i].x()) << ',' << cv.y(poly[i].y());
  o << "\" fill=\"" << fill << "\"" << extra << "/>\n";
}

void star(std::ostream& o, const Canvas& cv, const Vec2& c, double r, const char* fill) {
  o << "<polygon points=\"";
  for (int k = 0; k < 10; ++k) {
    const double a = std::numbers::pi / 2 + k * std::numbers::pi / 5;
    const double rr = k % 2 ? r * 0.45 : r;
    o << (k ? " " : "") << cv.x(c.x() + rr * std::cos(a)) << ',' << cv.y(c.y() + rr * std::sin(a));
  }
  o << "\" fill=\"" << fill << "\" stroke=\"#000\" stroke-width=\"1\"/>\n";
}

}  // namespace

void write_trajectory_svg(std::ostream& out, const TrialResult& trial, const WorldModel& world) {
  if (trial.trajectory.empty()) throw std::invalid_argument("trial has no trajectory to render");
  const Canvas cv{world.size.y()};
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << world.size.x() * kScale << "\" height=\""
    << world.size.y() * kScale << "\" viewBox=\"0 0 " << world.size.x() * kScale << ' ' << world.size.y() * kScale
    << "\">\n";
  o << "<title>seed " << trial.seed << ' ' << to_string(trial.method) << ' ' << to_string(trial.target) << ' '
    << to_string(trial.status) << "</title>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"" << kFill[static_cast<int>(ClassLabel::Grass)] << "\"/>\n";
  // Same stacking as the ground truth: later regions under earlier ones, houses on top.
  for (auto it = world.regions.rbegin(); it != world.regions.rend(); ++it) {
    polygon(o, cv, it->polygon, kFill[static_cast<int>(it->label)]);
  }
  for (const House& h : world.houses) {
    polygon(o, cv, h.footprint, kFill[static_cast<int>(ClassLabel::Roof)],
            h.recipient ? " stroke=\"#000\" stroke-width=\"2\"" : "");
  }
  // Door as a short segment along the wall.
  const Vec2 along(-world.door.normal.y(), world.door.normal.x());
  const Vec2 a = world.door.center + along * world.door.width / 2;
  const Vec2 b = world.door.center - along * world.door.width / 2;
  o << "<line x1=\"" << cv.x(a.x()) << "\" y1=\"" << cv.y(a.y()) << "\" x2=\"" << cv.x(b.x()) << "\" y2=\""
    << cv.y(b.y()) << "\" stroke=\"#fdd835\" stroke-width=\"5\"/>\n";

  o << "<polyline fill=\"none\" stroke=\"#8e24aa\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < trial.trajectory.size(); ++i) {
    const DronePose& p = trial.trajectory[i].pose;
    o << (i ? " " : "") << cv.x(p.x) << ',' << cv.y(p.y);
  }
  o << "\"/>\n";
  // Vertical motion shows up as dots piling on the same spot.
  for (std::size_t i = 0; i < trial.trajectory.size(); i += 10) {
    const DronePose& p = trial.trajectory[i].pose;
    o << "<circle cx=\"" << cv.x(p.x) << "\" cy=\"" << cv.y(p.y) << "\" r=\"1.5\" fill=\"#4a148c\" fill-opacity=\"0.4\"/>\n";
  }
  if (trial.has_descent_point) {
    o << "<circle cx=\"" << cv.x(trial.descent_point.x()) << "\" cy=\"" << cv.y(trial.descent_point.y())
      << "\" r=\"6\" fill=\"none\" stroke=\"#fff\" stroke-width=\"3\"/>\n";
  }
  const Vec2 goal = trial.target == DeliveryTarget::FrontDoor ? world.door.center : trial.final_point;
  star(o, cv, goal, 1.2, "#ffeb3b");
  o << "</svg>\n";
  out << o.str();
}

void emit_trajectory_svg(const TrialResult& trial, const WorldModel& world, const std::string& path) {
  if (trial.trajectory.empty()) throw std::invalid_argument("trial has no trajectory to render");
  std::ostringstream body;
  write_trajectory_svg(body, trial, world);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body.str();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace doorstep
