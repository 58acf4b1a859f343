#include "doorstep/occupancy.hpp"

#include "doorstep/distance_transform.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>

namespace doorstep {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// 8-neighborhood, clockwise on screen (y down) starting west.
const Cell kMoore[8] = {Cell(-1, 0), Cell(-1, -1), Cell(0, -1), Cell(1, -1),
                        Cell(1, 0),  Cell(1, 1),   Cell(0, 1),  Cell(-1, 1)};

}  // namespace

OccupancyGrid build_occupancy(const SemanticGrid& grid, const CameraModel& cam, double h_capture,
                              const Vec2& capture_xy) {
  if (!(h_capture > 0.0)) throw std::invalid_argument("occupancy map needs a positive capture height");
  if (cam.fx != cam.fy) throw std::invalid_argument("occupancy map needs square pixels (fx == fy)");
  OccupancyGrid occ;
  occ.frame.resolution = h_capture / cam.fx;
  occ.frame.origin = capture_xy + pixel_to_ground_offset(Vec2(0.0, 0.0), cam, h_capture);
  occ.frame.width = grid.width();
  occ.frame.height = grid.height();
  occ.occupied.resize(grid.height(), grid.width());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const ClassLabel l = grid.at(c, r);
      occ.occupied(r, c) = (l == ClassLabel::PavedArea || l == ClassLabel::Grass) ? 0 : 1;
    }
  }
  return occ;
}

double path_length(const std::vector<Vec2>& waypoints) {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += (waypoints[i] - waypoints[i - 1]).norm();
  return len;
}

Path make_path(std::vector<Vec2> waypoints) {
  Path p;
  p.total_length = path_length(waypoints);
  p.waypoints = std::move(waypoints);
  return p;
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Ok: return "ok";
    case PlanStatus::Unreachable: return "unreachable";
    case PlanStatus::StartOccupied: return "start_occupied";
    case PlanStatus::GoalOccupied: return "goal_occupied";
  }
  return "ok";
}

double PlanResult::cost() const { return static_cast<double>(straight) + static_cast<double>(diagonal) * kSqrt2; }

ByteRaster inflate(const OccupancyGrid& occ, double inflation) {
  const DistanceRaster d2 = squared_distance_transform(occ.occupied);
  const double r = inflation / occ.frame.resolution;
  const double r2 = r * r + 1e-9;  // 0.3 / 0.1 is not exactly 3
  ByteRaster blocked(occ.height(), occ.width());
  for (int row = 0; row < occ.height(); ++row) {
    for (int c = 0; c < occ.width(); ++c) blocked(row, c) = d2(row, c) <= r2 ? 1 : 0;
  }
  return blocked;
}

PlanResult plan_path_blocked(const GridFrame& frame, const ByteRaster& blocked, const Vec2& start, const Vec2& goal,
                             bool free_start) {
  PlanResult out;
  const Cell s = frame.cell_of(start);
  const Cell g = frame.cell_of(goal);
  const auto free = [&](const Cell& c) {
    return frame.in_bounds(c) && (blocked(c.y(), c.x()) == 0 || (free_start && c == s));
  };
  if (!free(s)) {
    out.status = PlanStatus::StartOccupied;
    return out;
  }
  if (!free(g)) {
    out.status = PlanStatus::GoalOccupied;
    return out;
  }

  const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
  std::vector<long> gs(n, -1), gd(n, -1);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  const auto value = [](long a, long b) { return static_cast<double>(a) + static_cast<double>(b) * kSqrt2; };
  const auto heuristic = [&](const Cell& c, long& hs, long& hd) {
    const long dx = std::abs(c.x() - g.x());
    const long dy = std::abs(c.y() - g.y());
    hd = std::min(dx, dy);
    hs = std::max(dx, dy) - hd;
  };

  using Entry = std::tuple<double, long, std::size_t>;  // f, -g tie-break by insertion order, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  long pushes = 0;
  const std::size_t si = frame.index(s);
  const std::size_t gi = frame.index(g);
  gs[si] = 0;
  gd[si] = 0;
  {
    long hs = 0, hd = 0;
    heuristic(s, hs, hd);
    open.emplace(value(hs, hd), pushes++, si);
  }
  while (!open.empty()) {
    const std::size_t ci = std::get<2>(open.top());
    open.pop();
    if (closed[ci]) continue;
    closed[ci] = 1;
    if (ci == gi) break;
    const Cell c(static_cast<int>(ci % frame.width), static_cast<int>(ci / frame.width));
    for (int k = 0; k < 8; ++k) {
      const Cell m = c + kMoore[k];
      if (!free(m)) continue;
      const bool diag = kMoore[k].x() != 0 && kMoore[k].y() != 0;
      // No corner cutting: both orthogonal neighbors must be free.
      if (diag && (!free(Cell(m.x(), c.y())) || !free(Cell(c.x(), m.y())))) continue;
      const std::size_t mi = frame.index(m);
      if (closed[mi]) continue;
      const long ns = gs[ci] + (diag ? 0 : 1);
      const long nd = gd[ci] + (diag ? 1 : 0);
      if (gs[mi] >= 0 && !(value(ns, nd) < value(gs[mi], gd[mi]))) continue;
      gs[mi] = ns;
      gd[mi] = nd;
      parent[mi] = static_cast<int>(ci);
      long hs = 0, hd = 0;
      heuristic(m, hs, hd);
      open.emplace(value(ns + hs, nd + hd), pushes++, mi);
    }
  }
  if (!closed[gi]) {
    out.status = PlanStatus::Unreachable;
    return out;
  }

  std::vector<Vec2> pts;
  for (int i = static_cast<int>(gi); i >= 0; i = parent[i]) {
    pts.push_back(frame.center(Cell(i % frame.width, i / frame.width)));
  }
  std::reverse(pts.begin(), pts.end());
  std::vector<Vec2> wp;
  wp.push_back(start);
  for (const auto& p : pts) {
    if ((p - wp.back()).norm() > 1e-12) wp.push_back(p);
  }
  if ((goal - wp.back()).norm() > 1e-12) wp.push_back(goal);
  out.status = PlanStatus::Ok;
  out.straight = gs[gi];
  out.diagonal = gd[gi];
  out.path = make_path(std::move(wp));
  return out;
}

PlanResult plan_path(const OccupancyGrid& occ, const Vec2& start, const Vec2& goal, double inflation) {
  return plan_path_blocked(occ.frame, inflate(occ, inflation), start, goal);
}

namespace {

// Traced outer boundary of the standoff band and which of its cells a route may use.
struct RingTrace {
  std::vector<Cell> contour;
  std::vector<bool> kept;
};

RingTrace trace_ring(const OccupancyGrid& occ, const Segment& roof, double standoff, double inflation) {
  if (roof.pixels.empty()) throw std::invalid_argument("roof segment is empty");
  if (!(standoff > 0.0)) throw std::invalid_argument("standoff must be positive");
  const GridFrame& f = occ.frame;
  const double res = f.resolution;

  ByteRaster roof_mask = ByteRaster::Zero(f.height, f.width);
  for (const auto& p : roof.pixels) {
    if (!f.in_bounds(p)) throw std::invalid_argument("roof pixel outside the occupancy grid");
    roof_mask(p.y(), p.x()) = 1;
  }
  const DistanceRaster d2 = squared_distance_transform(roof_mask);
  const ByteRaster blocked = inflate(occ, inflation);

  // Band D = cells closer than standoff + one cell diagonal. Its traced outer
  // boundary has a neighbor outside D, so every boundary cell is >= standoff.
  const double outer = standoff / res + kSqrt2;
  const auto in_band = [&](const Cell& c) { return f.in_bounds(c) && std::sqrt(d2(c.y(), c.x())) < outer; };

  Cell start(-1, -1);
  for (int r = 0; r < f.height && start.x() < 0; ++r) {
    for (int c = 0; c < f.width; ++c) {
      if (in_band(Cell(c, r))) {
        start = Cell(c, r);
        break;
      }
    }
  }

  // Moore-neighbor tracing with Jacob's stopping criterion.
  std::vector<Cell> contour{start};
  Cell cur = start;
  int back = 0;  // index in kMoore of the background cell we came from (west of the start)
  const int first_back = back;
  const std::size_t cap = static_cast<std::size_t>(f.width) * f.height * 4 + 16;
  for (std::size_t it = 0; it < cap; ++it) {
    int found = -1;
    for (int i = 1; i <= 8; ++i) {
      const int j = (back + i) % 8;
      if (in_band(cur + kMoore[j])) {
        found = j;
        break;
      }
    }
    if (found < 0) break;  // isolated cell
    const Cell prev_bg = cur + kMoore[(found + 7) % 8];
    cur = cur + kMoore[found];
    const Cell rel = prev_bg - cur;
    back = static_cast<int>(std::find(std::begin(kMoore), std::end(kMoore), rel) - std::begin(kMoore));
    if (cur == start && back == first_back) break;
    contour.push_back(cur);
  }
  // The loop may list the start again before closing; drop trailing repeats of it.
  while (contour.size() > 1 && contour.back() == start) contour.pop_back();

  RingTrace out;
  out.contour = std::move(contour);
  for (const Cell& c : out.contour) {
    out.kept.push_back(!occ.is_occupied(c) && !blocked(c.y(), c.x()) && std::sqrt(d2(c.y(), c.x())) * res >= standoff);
  }
  return out;
}

// Index of the point nearest `near` (0 without one).
std::size_t nearest_index(const std::vector<Vec2>& pts, std::optional<Vec2> near) {
  std::size_t i0 = 0;
  if (!near) return i0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - *near).squaredNorm();
    if (d < best) {
      best = d;
      i0 = i;
    }
  }
  return i0;
}

double turn_cost(const Vec2& from, const Vec2& to, std::optional<double> heading) {
  if (!heading) return 0.0;
  return std::abs(normalize_angle(std::atan2(to.y() - from.y(), to.x() - from.x()) - *heading));
}

// Walk a cyclic point list once from i0, returning to it.
std::vector<Vec2> walk_loop(const std::vector<Vec2>& pts, std::size_t i0, std::optional<double> heading) {
  const std::size_t m = pts.size();
  if (m == 1) return pts;
  const bool forward = turn_cost(pts[i0], pts[(i0 + 1) % m], heading) <= turn_cost(pts[i0], pts[(i0 + m - 1) % m], heading);
  std::vector<Vec2> wp;
  for (std::size_t k = 0; k <= m; ++k) wp.push_back(pts[forward ? (i0 + k) % m : (i0 + m - k % m) % m]);
  return wp;
}

}  // namespace

Path extract_footprint_ring(const OccupancyGrid& occ, const Segment& roof, double standoff, double inflation,
                            std::optional<Vec2> near, std::optional<double> heading) {
  const RingTrace t = trace_ring(occ, roof, standoff, inflation);
  const GridFrame& f = occ.frame;
  const std::size_t n = t.contour.size();
  std::vector<Cell> cells;
  bool closed = true;
  std::size_t first_gap = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.kept[i]) {
      first_gap = i;
      break;
    }
  }
  if (first_gap == n) {
    cells = t.contour;
  } else {
    closed = false;
    // Longest run of kept cells, walking cyclically from the first gap.
    std::vector<Cell> run;
    for (std::size_t k = 1; k <= n; ++k) {
      const std::size_t i = (first_gap + k) % n;
      if (t.kept[i]) {
        run.push_back(t.contour[i]);
      } else {
        if (run.size() > cells.size()) cells = run;
        run.clear();
      }
    }
    if (run.size() > cells.size()) cells = run;
  }
  if (cells.empty()) throw NoRingExists();

  std::vector<Vec2> pts;
  for (const auto& c : cells) pts.push_back(f.center(c));
  const std::size_t m = pts.size();
  const std::size_t i0 = nearest_index(pts, near);
  if (closed) return make_path(walk_loop(pts, i0, heading));

  // Open arc: to the end the heading prefers, then back across to the other end.
  bool forward = true;
  if (i0 == m - 1) {
    forward = false;
  } else if (i0 > 0) {
    forward = turn_cost(pts[i0], pts[i0 + 1], heading) <= turn_cost(pts[i0], pts[i0 - 1], heading);
  }
  std::vector<Vec2> wp;
  if (forward) {
    for (std::size_t i = i0; i < m; ++i) wp.push_back(pts[i]);
    if (i0 > 0) {
      for (std::size_t i = m - 1; i-- > 0;) wp.push_back(pts[i]);
    }
  } else {
    for (std::size_t i = i0 + 1; i-- > 0;) wp.push_back(pts[i]);
    if (i0 + 1 < m) {
      for (std::size_t i = 1; i < m; ++i) wp.push_back(pts[i]);
    }
  }
  return make_path(std::move(wp));
}

Path footprint_search_loop(const OccupancyGrid& occ, const Segment& roof, double standoff, double inflation,
                           std::optional<Vec2> near, std::optional<double> heading) {
  const RingTrace t = trace_ring(occ, roof, standoff, inflation);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < t.contour.size(); ++i) {
    if (t.kept[i]) pts.push_back(occ.frame.center(t.contour[i]));
  }
  if (pts.empty()) throw NoRingExists();
  return make_path(walk_loop(pts, nearest_index(pts, near), heading));
}

void write_ascii(std::ostream& out, const OccupancyGrid& occ) {
  out << occ.width() << ' ' << occ.height() << ' ' << std::setprecision(17) << occ.frame.resolution << ' '
      << occ.frame.origin.x() << ' ' << occ.frame.origin.y() << '\n';
  for (int r = 0; r < occ.height(); ++r) {
    for (int c = 0; c < occ.width(); ++c) out << (occ.occupied(r, c) ? '#' : '.');
    out << '\n';
  }
}

OccupancyGrid read_occupancy_ascii(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("occupancy raster: missing header");
  std::istringstream header(line);
  OccupancyGrid occ;
  double ox = 0.0, oy = 0.0;
  if (!(header >> occ.frame.width >> occ.frame.height >> occ.frame.resolution >> ox >> oy)) {
    throw std::runtime_error("occupancy raster: bad header '" + line + "'");
  }
  if (occ.frame.width < 1 || occ.frame.height < 1 || !(occ.frame.resolution > 0.0)) {
    throw std::runtime_error("occupancy raster: invalid dimensions");
  }
  occ.frame.origin = Vec2(ox, oy);
  occ.occupied.resize(occ.frame.height, occ.frame.width);
  for (int r = 0; r < occ.frame.height; ++r) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) < occ.frame.width) {
      throw std::runtime_error("occupancy raster: row " + std::to_string(r) + " too short");
    }
    for (int c = 0; c < occ.frame.width; ++c) {
      if (line[c] != '#' && line[c] != '.') {
        throw std::runtime_error("occupancy raster: bad code in row " + std::to_string(r));
      }
      occ.occupied(r, c) = line[c] == '#' ? 1 : 0;
    }
  }
  return occ;
}

}  // namespace doorstep
