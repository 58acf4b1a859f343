#pragma once

#include "doorstep/geometry.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string_view>
#include <vector>

namespace doorstep {

enum class ClassLabel : std::uint8_t {
  Roof = 0,
  PavedArea,
  Grass,
  Vegetation,
  Fence,
  Car,
  Tree,
  Unknown,
};

inline constexpr int kClassCount = 8;

/// Vegetation, Fence, Car and Tree.
constexpr bool is_obstacle(ClassLabel c) {
  return c == ClassLabel::Vegetation || c == ClassLabel::Fence || c == ClassLabel::Car ||
         c == ClassLabel::Tree;
}

/// Anything a descent point must keep clear of: roofs plus obstacles.
constexpr bool is_clearance_source(ClassLabel c) { return c == ClassLabel::Roof || is_obstacle(c); }

char label_code(ClassLabel c);
ClassLabel label_from_code(char code);  // throws std::invalid_argument
std::string_view label_name(ClassLabel c);

using ByteRaster = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major raster of class labels; the drone sits at the image center.
class SemanticGrid {
 public:
  SemanticGrid() = default;
  SemanticGrid(int width, int height, double resolution, ClassLabel fill = ClassLabel::Grass);

  int width() const { return static_cast<int>(labels_.cols()); }
  int height() const { return static_cast<int>(labels_.rows()); }
  double resolution() const { return resolution_; }

  bool in_bounds(int col, int row) const { return col >= 0 && row >= 0 && col < width() && row < height(); }
  ClassLabel at(int col, int row) const { return static_cast<ClassLabel>(labels_(row, col)); }
  ClassLabel at(const Cell& c) const { return at(c.x(), c.y()); }
  void set(int col, int row, ClassLabel c) { labels_(row, col) = static_cast<std::uint8_t>(c); }

  /// p_drone = (W/2, H/2).
  Vec2 drone_point() const { return Vec2(width() / 2.0, height() / 2.0); }
  /// Pixel under the drone.
  Cell drone_pixel() const { return Cell(width() / 2, height() / 2); }

  const ByteRaster& raster() const { return labels_; }
  ByteRaster& raster() { return labels_; }

  std::size_t count(ClassLabel c) const;

  friend bool operator==(const SemanticGrid& a, const SemanticGrid& b) {
    return a.resolution_ == b.resolution_ && a.labels_.rows() == b.labels_.rows() &&
           a.labels_.cols() == b.labels_.cols() && (a.labels_ == b.labels_).all();
  }

 private:
  ByteRaster labels_;
  double resolution_ = 1.0;
};

/// 4-connected region of one class.
struct Segment {
  ClassLabel label = ClassLabel::Unknown;
  std::vector<Cell> pixels;
  Vec2 centroid = Vec2::Zero();
  bool touches_image_boundary = false;

  std::size_t area() const { return pixels.size(); }
};

/// Maximal 4-connected segments of `label`, ordered by their top-left-most pixel
/// (first in row-major scan).
std::vector<Segment> connected_components(const SemanticGrid& grid, ClassLabel label);

enum class Side : std::uint8_t { NotGrass = 0, Front, Back };

struct FrontBackMask {
  ByteRaster sides;

  int width() const { return static_cast<int>(sides.cols()); }
  int height() const { return static_cast<int>(sides.rows()); }
  Side at(int col, int row) const { return static_cast<Side>(sides(row, col)); }
  Side at(const Cell& c) const { return at(c.x(), c.y()); }
  std::size_t count(Side s) const;
};

/// Wrap an angle into (-pi, pi]. Applies the single +-2pi correction when the
/// input is within one turn, otherwise reduces by whole turns.
template <typename Scalar>
Scalar normalize_angle(Scalar theta) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  if (theta > pi || theta <= -pi) {
    if (std::abs(theta) > 3 * pi) theta -= two_pi * std::round(theta / two_pi);
    while (theta > pi) theta -= two_pi;
    while (theta <= -pi) theta += two_pi;
  }
  return theta;
}

/// Angle of (pixel - c_roof) relative to `front_dir`, wrapped into (-pi, pi].
double front_angle(const Vec2& pixel, const Vec2& c_roof, const Vec2& front_dir);

/// Front iff the wrapped angle lies in [-pi/2, pi/2].
Side classify_point(const Vec2& pixel, const Vec2& c_roof, const Vec2& front_dir);

/// Label every Grass pixel Front or Back by its angle about the roof centroid
/// relative to the direction the house faces. Throws std::invalid_argument for a
/// zero `front_dir`.
FrontBackMask classify_grass_front_back(const SemanticGrid& grid, const Vec2& c_roof, const Vec2& front_dir);

/// Blob-structured relabeling standing in for segmentation errors.
struct LabelNoiseModel {
  /// flip(from, to): fraction of `from` pixels relabeled as `to`.
  Eigen::Matrix<double, kClassCount, kClassCount> flip =
      Eigen::Matrix<double, kClassCount, kClassCount>::Zero();
  int blob_size = 25;
  std::uint64_t seed = 0;

  void set(ClassLabel from, ClassLabel to, double p) {
    flip(static_cast<int>(from), static_cast<int>(to)) = p;
  }
  bool is_identity() const { return (flip.array() == 0.0).all(); }
  void validate() const;  // throws std::invalid_argument
};

SemanticGrid apply_label_noise(const SemanticGrid& grid, const LabelNoiseModel& model);

/// ASCII raster: "W H resolution" then H lines of W class codes (R,P,G,V,F,C,T,U).
void write_ascii(std::ostream& out, const SemanticGrid& grid);
SemanticGrid read_ascii(std::istream& in);  // throws std::runtime_error

}  // namespace doorstep
