#pragma once

#include "doorstep/geometry.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace doorstep {

/// Downward-facing pinhole camera. Image axes are kept aligned with the world
/// x/y axes (gimbal-stabilized), so pixels map to the ground by translation only.
struct CameraModel {
  double fx = 100.0;
  double fy = 100.0;
  double cx = 100.0;
  double cy = 100.0;
  int width = 200;
  int height = 200;

  /// Square-pixel camera with the optical center on the image-center pixel.
  static CameraModel centered(int width, int height, double focal) {
    return CameraModel{focal, focal, static_cast<double>(width / 2), static_cast<double>(height / 2), width, height};
  }

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera focal lengths must be positive");
    if (width < 1 || height < 1) throw std::invalid_argument("camera image must be at least 1x1");
    if (cx < 0.0 || cy < 0.0 || cx > width || cy > height) {
      throw std::invalid_argument("camera optical center must lie inside the image");
    }
  }

  /// Ground meters per pixel along x at height h.
  double ground_scale_x(double h) const { return h / fx; }
  double ground_scale_y(double h) const { return h / fy; }
};

/// Pixel (u, v) at flying height h to camera-frame (U, V, W):
///   U = h (u - O_x) / f_x,  V = h (v - O_y) / f_y,  W = h.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> backproject(const Eigen::Matrix<Scalar, 2, 1>& pixel, const CameraModel& cam,
                                        Scalar h) {
  if (!(h > Scalar(0))) throw std::invalid_argument("back-projection needs a positive height");
  return {h * (pixel.x() - Scalar(cam.cx)) / Scalar(cam.fx), h * (pixel.y() - Scalar(cam.cy)) / Scalar(cam.fy), h};
}

/// Inverse of backproject for points in front of the camera.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> project(const Eigen::Matrix<Scalar, 3, 1>& point, const CameraModel& cam) {
  if (!(point.z() > Scalar(0))) throw std::invalid_argument("projection needs positive depth");
  return {Scalar(cam.fx) * point.x() / point.z() + Scalar(cam.cx),
          Scalar(cam.fy) * point.y() / point.z() + Scalar(cam.cy)};
}

/// Ground offset (world x/y) of a pixel relative to the point under the camera.
inline Vec2 pixel_to_ground_offset(const Vec2& pixel, const CameraModel& cam, double h) {
  return backproject<double>(pixel, cam, h).head<2>();
}

/// Fractional pixel of a world ground point seen from `camera_xy` at height h.
inline Vec2 ground_to_pixel(const Vec2& world, const Vec2& camera_xy, const CameraModel& cam, double h) {
  const Vec2 d = world - camera_xy;
  return project<double>(Vec3(d.x(), d.y(), h), cam);
}

}  // namespace doorstep
