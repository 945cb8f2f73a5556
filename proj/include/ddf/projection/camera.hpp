#pragma once

#include <optional>
#include <vector>

#include "ddf/common/types.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf {

/// Perspective camera: intrinsics plus the rigid pose mapping wrist-frame
/// points into the camera frame (X_cam = R P + t).
struct CameraPose {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Throws std::invalid_argument when fx, fy <= 0 or R is not orthonormal.
  void validate() const;

  /// Camera centre expressed in the wrist frame.
  Vec3 center() const { return -(rotation.transpose() * translation); }

  /// Unit wrist-frame direction of the viewing ray through pixel (u, v).
  Vec3 pixel_direction(const Vec2& pixel) const;
};

inline constexpr double kMinDepth = 1e-6;        // camera-frame z below this is "behind camera"
inline constexpr double kProjectionOffset = 0.1;  // distance to the second point P* along the ray
inline constexpr double kDegenerateTolerance = 1e-6;  // pixels

/// Projected 2D ray. `direction` is empty for the degenerate case where
/// the 3D ray projects to a single pixel.
struct Ray2D {
  Vec2 p = Vec2::Zero();
  std::optional<Vec2> direction;

  bool degenerate() const { return !direction.has_value(); }
};

/// Pixel coordinates of a wrist-frame point. Throws std::domain_error
/// ("behind camera") when the camera-frame depth is <= kMinDepth.
Vec2 project_point(const CameraPose& camera, const Vec3& point);

/// Project origin and origin + offset * direction; a pixel displacement
/// shorter than kDegenerateTolerance marks the ray as degenerate.
Ray2D project_ray(const CameraPose& camera, const Ray& ray, double offset = kProjectionOffset);

/// K points p + i * spacing * theta* for i = 1..count.
/// Throws std::invalid_argument on degenerate input or count == 0.
std::vector<Vec2> sample_2d_points(const Ray2D& ray, int count, double spacing);

}  // namespace ddf
