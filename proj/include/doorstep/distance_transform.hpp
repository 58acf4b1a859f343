#pragma once

#include "doorstep/semantics.hpp"

#include <Eigen/Core>

namespace doorstep {

using DistanceRaster = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Squared anisotropic distance between pixel offsets; every clearance test in
/// the library goes through this so exact comparisons agree across code paths.
inline double squared_metric(long dx, long dy, double sx2, double sy2) {
  return sy2 * static_cast<double>(dy * dy) + sx2 * static_cast<double>(dx * dx);
}

/// Exact squared Euclidean distance from every cell to the nearest non-zero cell
/// of `sources`, with per-axis squared spacings sx2 (columns) and sy2 (rows).
/// Cells with no source anywhere get +inf. Two-pass lower-envelope algorithm
/// (Felzenszwalb & Huttenlocher).
DistanceRaster squared_distance_transform(const ByteRaster& sources, double sx2 = 1.0, double sy2 = 1.0);

}  // namespace doorstep
