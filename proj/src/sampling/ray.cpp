#include "ddf/sampling/ray.hpp"

#include <cmath>
#include <stdexcept>

#include "ddf/geometry/intersect.hpp"

namespace ddf {

void BoundingVolume::validate() const {
  if (!min.allFinite() || !max.allFinite()) {
    throw std::invalid_argument("bounding volume has non-finite bounds");
  }
  if (!(min.array() < max.array()).all()) {
    throw std::invalid_argument("bounding volume min must be < max component-wise");
  }
}

bool BoundingVolume::contains(const Vec3& p, double tol) const {
  return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
}

void RigidTransform::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw std::invalid_argument("rigid transform has non-finite entries");
  }
  if (((rotation.transpose() * rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-7) {
    throw std::invalid_argument("rotation is not orthonormal");
  }
  if (rotation.determinant() < 0.0) throw std::invalid_argument("rotation has det -1");
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

RigidTransform RigidTransform::then(const RigidTransform& next) const {
  return {next.rotation * rotation, next.rotation * translation + next.translation};
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis_angle, const Vec3& translation) {
  return {axis_angle_to_matrix(axis_angle), translation};
}

Mat3 axis_angle_to_matrix(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

void validate_ray(const Ray& ray) {
  if (!ray.origin.allFinite() || !ray.direction.allFinite()) {
    throw std::invalid_argument("ray has non-finite components");
  }
  require_unit_direction(ray.direction);
}

}  // namespace ddf
