#pragma once

#include <optional>

#include "ddf/common/types.hpp"

namespace ddf {

/// Directed point: origin P and unit direction theta.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();

  Vec3 at(double t) const { return origin + t * direction; }
};

/// Axis-aligned box acting as the domain of the field.
struct BoundingVolume {
  Vec3 min = Vec3::Constant(-1.0);
  Vec3 max = Vec3::Constant(1.0);

  /// Throws std::invalid_argument unless min < max component-wise.
  void validate() const;
  bool contains(const Vec3& p, double tol = 0.0) const;
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double diagonal() const { return extent().norm(); }
};

/// Ground-truth (or predicted) field value for one ray. `depth` is engaged
/// exactly when the ray is visible.
struct DdfSample {
  Ray ray;
  std::optional<double> depth;

  bool visible() const { return depth.has_value(); }
  int xi() const { return visible() ? 1 : 0; }
};

/// Oriented plane through `point` with unit `normal`.
struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();

  double signed_distance(const Vec3& p) const { return normal.dot(p - point); }
  Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal; }
  Vec3 reflect_direction(const Vec3& d) const { return d - 2.0 * normal.dot(d) * normal; }
  Vec3 reflect_point(const Vec3& p) const { return p - 2.0 * signed_distance(p) * normal; }
};

/// Two rays sharing an origin on `plane` with mirrored directions.
struct SymmetryPair {
  Ray a;
  Ray b;
  Plane plane;
};

/// Proper rigid motion x -> R x + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Throws std::invalid_argument when R^T R != I (1e-7) or det R != +1.
  void validate() const;

  Vec3 apply_point(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation * v; }
  RigidTransform inverse() const;
  RigidTransform then(const RigidTransform& next) const;

  static RigidTransform from_axis_angle(const Vec3& axis_angle, const Vec3& translation);
};

/// Rotation matrix of an axis-angle vector (Rodrigues).
Mat3 axis_angle_to_matrix(const Vec3& axis_angle);

/// Throws std::invalid_argument when the ray's direction is not unit within
/// 1e-9 or its origin/direction are not finite.
void validate_ray(const Ray& ray);

}  // namespace ddf
