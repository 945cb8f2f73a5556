#pragma once

#include <vector>

#include "ddf/hand/skeleton.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf {

/// 45 axis-angle parameters (15 joints x 3), radians, expressed in each
/// articulated joint's rest frame.
struct HandPose {
  std::vector<double> theta;

  static HandPose zero(std::size_t joints = kManoArticulatedJoints) {
    return {std::vector<double>(3 * joints, 0.0)};
  }
  Vec3 joint(std::size_t i) const { return {theta[3 * i], theta[3 * i + 1], theta[3 * i + 2]}; }

  /// Wrap every axis-angle to magnitude <= pi (same rotation).
  HandPose canonical() const;
};

/// Pose the skeleton. Articulated joint k (see articulated_joints) rotates
/// its subtree by R_k = F_k exp(theta_k) F_k^T in rest coordinates; rotations
/// compose root to leaf. The root stays fixed. Throws std::invalid_argument
/// unless pose.theta.size() == 3 * articulated_joints().size().
HandSkeleton forward_kinematics(const HandSkeleton& rest, const HandPose& pose);

struct ClosestApproach {
  Vec3 on_ray = Vec3::Zero();       // P_S
  Vec3 on_skeleton = Vec3::Zero();  // P_D
  int bone = 0;
  double distance = 0.0;
};

/// Shortest segment between the half-line P + t theta (t >= 0) and the
/// union of bone segments; ties go to the lowest bone index.
ClosestApproach ray_skeleton_closest(const Ray& ray, const HandSkeleton& skeleton);

/// K joints nearest to `point` (lying on `bone`) by graph-geodesic
/// distance along the bones, sorted by distance then joint index.
/// Throws std::invalid_argument for k == 0, k > joint count, an invalid
/// bone, or a point farther than 1e-6 from the bone.
std::vector<int> geodesic_knn(const HandSkeleton& skeleton, const Vec3& point, int bone, int k);

/// Geodesic distances from `point` on `bone` to every joint.
std::vector<double> geodesic_distances(const HandSkeleton& skeleton, const Vec3& point, int bone);

/// Coordinates of `point` in each listed joint frame, 3 values per joint in
/// list order. Throws std::invalid_argument on invalid or repeated ids.
std::vector<double> local_intersection_feature(const Vec3& point, const HandSkeleton& skeleton,
                                               const std::vector<int>& joint_ids);

/// Ray origin and direction expressed in every joint frame: 6 values per
/// joint (R^T (P - o), R^T theta).
std::vector<double> global_hand_embedding(const Ray& ray, const HandSkeleton& skeleton);

/// Full 3D hand feature pipeline for one ray: closest approach, geodesic
/// neighbours, local coordinates.
std::vector<double> hand_local_feature(const Ray& ray, const HandSkeleton& skeleton, int k);

}  // namespace ddf
