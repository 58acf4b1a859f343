#include "doorstep/semantics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace doorstep {

namespace {

constexpr std::array<char, kClassCount> kCodes = {'R', 'P', 'G', 'V', 'F', 'C', 'T', 'U'};
constexpr std::array<std::string_view, kClassCount> kNames = {
    "roof", "paved_area", "grass", "vegetation", "fence", "car", "tree", "unknown"};

const std::array<Cell, 4> kFourNeighbors = {Cell(1, 0), Cell(0, 1), Cell(-1, 0), Cell(0, -1)};

}  // namespace

char label_code(ClassLabel c) { return kCodes.at(static_cast<std::size_t>(c)); }

ClassLabel label_from_code(char code) {
  for (std::size_t i = 0; i < kCodes.size(); ++i) {
    if (kCodes[i] == code) return static_cast<ClassLabel>(i);
  }
  throw std::invalid_argument(std::string("unknown class code '") + code + "'");
}

std::string_view label_name(ClassLabel c) { return kNames.at(static_cast<std::size_t>(c)); }

SemanticGrid::SemanticGrid(int width, int height, double resolution, ClassLabel fill)
    : labels_(ByteRaster::Constant(height, width, static_cast<std::uint8_t>(fill))), resolution_(resolution) {
  if (width < 1 || height < 1) throw std::invalid_argument("semantic grid must be at least 1x1");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("semantic grid resolution must be positive");
  }
}

std::size_t SemanticGrid::count(ClassLabel c) const {
  return static_cast<std::size_t>((labels_ == static_cast<std::uint8_t>(c)).count());
}

std::size_t FrontBackMask::count(Side s) const {
  return static_cast<std::size_t>((sides == static_cast<std::uint8_t>(s)).count());
}

std::vector<Segment> connected_components(const SemanticGrid& grid, ClassLabel label) {
  const int w = grid.width();
  const int h = grid.height();
  const auto code = static_cast<std::uint8_t>(label);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Segment> segments;
  std::deque<Cell> queue;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * w + c;
      if (seen[idx] || grid.raster()(r, c) != code) continue;
      Segment seg;
      seg.label = label;
      seen[idx] = 1;
      queue.emplace_back(c, r);
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      while (!queue.empty()) {
        const Cell p = queue.front();
        queue.pop_front();
        seg.pixels.push_back(p);
        sum += p.cast<double>();
        if (p.x() == 0 || p.y() == 0 || p.x() == w - 1 || p.y() == h - 1) seg.touches_image_boundary = true;
        for (const Cell& d : kFourNeighbors) {
          const Cell q = p + d;
          if (!grid.in_bounds(q.x(), q.y())) continue;
          const std::size_t qi = static_cast<std::size_t>(q.y()) * w + q.x();
          if (seen[qi] || grid.raster()(q.y(), q.x()) != code) continue;
          seen[qi] = 1;
          queue.push_back(q);
        }
      }
      seg.centroid = sum / static_cast<double>(seg.pixels.size());
      segments.push_back(std::move(seg));
    }
  }
  return segments;
}

double front_angle(const Vec2& pixel, const Vec2& c_roof, const Vec2& front_dir) {
  const Vec2 g = pixel - c_roof;
  const double theta = std::atan2(g.y(), g.x()) - std::atan2(front_dir.y(), front_dir.x());
  return normalize_angle(theta);
}

Side classify_point(const Vec2& pixel, const Vec2& c_roof, const Vec2& front_dir) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double theta = front_angle(pixel, c_roof, front_dir);
  return (theta >= -half_pi && theta <= half_pi) ? Side::Front : Side::Back;
}

FrontBackMask classify_grass_front_back(const SemanticGrid& grid, const Vec2& c_roof, const Vec2& front_dir) {
  if (front_dir.squaredNorm() == 0.0 || !front_dir.allFinite()) {
    throw std::invalid_argument("front direction must be non-zero");
  }
  FrontBackMask mask;
  mask.sides = ByteRaster::Zero(grid.height(), grid.width());
  const auto grass = static_cast<std::uint8_t>(ClassLabel::Grass);
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.raster()(r, c) != grass) continue;
      mask.sides(r, c) = static_cast<std::uint8_t>(classify_point(Vec2(c, r), c_roof, front_dir));
    }
  }
  return mask;
}

void LabelNoiseModel::validate() const {
  if (blob_size < 1) throw std::invalid_argument("noise blob size must be >= 1");
  for (int i = 0; i < kClassCount; ++i) {
    double row = 0.0;
    for (int j = 0; j < kClassCount; ++j) {
      const double p = flip(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability outside [0,1]");
      if (i != j) row += p;
    }
    if (row > 1.0 + 1e-12) throw std::invalid_argument("confusion row sums to more than 1");
  }
}

SemanticGrid apply_label_noise(const SemanticGrid& grid, const LabelNoiseModel& model) {
  model.validate();
  SemanticGrid out = grid;
  if (model.is_identity()) return out;

  const int w = grid.width();
  const int h = grid.height();
  std::mt19937_64 rng(model.seed);
  // Pixels already relabeled; each source pixel flips at most once.
  std::vector<std::uint8_t> flipped(static_cast<std::size_t>(w) * h, 0);

  for (int from = 0; from < kClassCount; ++from) {
    std::vector<std::size_t> members;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (grid.raster()(r, c) == from) members.push_back(static_cast<std::size_t>(r) * w + c);
      }
    }
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);

    std::size_t remaining = members.size();
    std::size_t cursor = 0;
    for (int to = 0; to < kClassCount; ++to) {
      const double p = model.flip(from, to);
      if (to == from || p <= 0.0) continue;
      std::binomial_distribution<long> draw(static_cast<long>(members.size()), p);
      auto quota = std::min<std::size_t>(static_cast<std::size_t>(draw(rng)), remaining);

      while (quota > 0 && cursor < members.size()) {
        const std::size_t seed_idx = members[cursor++];
        if (flipped[seed_idx]) continue;
        // Grow a 4-connected blob of unflipped source pixels.
        std::deque<std::size_t> frontier{seed_idx};
        flipped[seed_idx] = 1;
        std::size_t grown = 0;
        const std::size_t limit = std::min<std::size_t>(quota, static_cast<std::size_t>(model.blob_size));
        while (!frontier.empty() && grown < limit) {
          const std::size_t idx = frontier.front();
          frontier.pop_front();
          const int r = static_cast<int>(idx / w);
          const int c = static_cast<int>(idx % w);
          out.set(c, r, static_cast<ClassLabel>(to));
          ++grown;
          for (const Cell& d : kFourNeighbors) {
            const int nc = c + d.x();
            const int nr = r + d.y();
            if (!grid.in_bounds(nc, nr)) continue;
            const std::size_t ni = static_cast<std::size_t>(nr) * w + nc;
            if (flipped[ni] || grid.raster()(nr, nc) != from) continue;
            flipped[ni] = 1;
            frontier.push_back(ni);
          }
        }
        // Queued but unpainted pixels stay eligible for later blobs.
        for (std::size_t idx : frontier) flipped[idx] = 0;
        quota -= grown;
        remaining -= grown;
      }
    }
  }
  return out;
}

void write_ascii(std::ostream& out, const SemanticGrid& grid) {
  std::ostringstream header;
  header.precision(17);
  header << grid.width() << ' ' << grid.height() << ' ' << grid.resolution() << '\n';
  out << header.str();
  std::string line(static_cast<std::size_t>(grid.width()), ' ');
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) line[static_cast<std::size_t>(c)] = label_code(grid.at(c, r));
    out << line << '\n';
  }
}

SemanticGrid read_ascii(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("semantic raster: missing header");
  std::istringstream hs(header);
  int w = 0;
  int h = 0;
  double res = 0.0;
  if (!(hs >> w >> h >> res)) throw std::runtime_error("semantic raster: malformed header '" + header + "'");
  SemanticGrid grid(w, h, res);
  std::string line;
  for (int r = 0; r < h; ++r) {
    if (!std::getline(in, line)) throw std::runtime_error("semantic raster: truncated at row " + std::to_string(r));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != w) {
      throw std::runtime_error("semantic raster: row " + std::to_string(r) + " has " + std::to_string(line.size()) +
                               " codes, expected " + std::to_string(w));
    }
    for (int c = 0; c < w; ++c) {
      try {
        grid.set(c, r, label_from_code(line[static_cast<std::size_t>(c)]));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error("semantic raster: row " + std::to_string(r) + ": " + e.what());
      }
    }
  }
  return grid;
}

}  // namespace doorstep
