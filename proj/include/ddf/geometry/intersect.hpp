#pragma once

#include <optional>

#include "ddf/common/types.hpp"

namespace ddf {

/// First hit of a ray with a mesh.
struct RayHit {
  double t = 0.0;
  std::uint32_t face = 0;
  Vec3 point = Vec3::Zero();
};

/// Tolerance on |direction| - 1 accepted by the casting routines.
inline constexpr double kUnitTolerance = 1e-9;

/// Throws std::invalid_argument("direction not normalized") when
/// | |d| - 1 | > kUnitTolerance.
void require_unit_direction(const Vec3& direction);

/// Smallest t >= 0 with origin + t * direction inside triangle (v0, v1, v2),
/// edges and vertices included. Zero-area triangles never intersect. A ray
/// lying in the triangle's plane is clipped against the three edges, so an
/// origin inside the triangle yields t = 0.
std::optional<double> ray_triangle_intersect(const Vec3& origin, const Vec3& direction,
                                             const Vec3& v0, const Vec3& v1, const Vec3& v2);

/// Same test without the normalization check, for inner loops that have
/// already validated the direction.
std::optional<double> ray_triangle_intersect_unchecked(const Vec3& origin, const Vec3& direction,
                                                       const Vec3& v0, const Vec3& v1,
                                                       const Vec3& v2);

/// Closed-form visibility and depth of a sphere along a ray.
struct SphereDdf {
  bool visible = false;
  std::optional<double> depth;
};

/// Smallest non-negative root of |origin + t d - center|^2 = r^2.
/// Throws std::invalid_argument for radius <= 0 or a non-unit direction.
SphereDdf analytic_sphere_ddf(const Vec3& center, double radius, const Vec3& origin,
                              const Vec3& direction);

}  // namespace ddf
