#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ddf/common/types.hpp"

namespace ddf {

/// Segment between a joint and its parent. Bone i belongs to the i-th
/// non-root joint in index order.
struct Bone {
  int child = 0;
  int parent = 0;
};

/// Articulated kinematic tree. Each joint carries a local frame whose
/// columns are its x, y, z axes and whose origin is the joint position.
struct HandSkeleton {
  std::vector<Vec3> joints;
  std::vector<int> parent;  // -1 for the root
  std::vector<Mat3> frames;

  std::size_t joint_count() const { return joints.size(); }
  int root() const;
  std::vector<Bone> bones() const;
  /// Non-root joints with at least one child, in index order. These are
  /// the joints driven by the articulation parameters.
  std::vector<int> articulated_joints() const;
  std::vector<std::vector<int>> children() const;

  /// Throws std::invalid_argument naming the first violated invariant:
  /// sizes, single root, acyclic connected tree with parents listed before
  /// children, positive bone lengths, orthonormal right-handed frames.
  void validate() const;
};

inline constexpr int kManoJointCount = 21;
inline constexpr int kManoArticulatedJoints = 15;
inline constexpr int kPoseDimension = 3 * kManoArticulatedJoints;

/// Rest frames from joint positions: x along the outgoing bone (to the
/// lowest-index child, or from the parent for leaves), z = x cross up with
/// up = +Z (falling back to +Y when nearly parallel), y = z cross x. The
/// root gets the identity frame.
std::vector<Mat3> compute_rest_frames(const std::vector<Vec3>& joints,
                                      const std::vector<int>& parent);

/// Build a skeleton from positions and parents, deriving rest frames.
HandSkeleton make_skeleton(std::vector<Vec3> joints, std::vector<int> parent);

/// Parse the versioned text format:
///
///     # comments and blank lines are ignored
///     ddf-skeleton 1
///     joints <N>
///     <index> <parent or -1> <x> <y> <z> [name]
///     ... N joint lines in index order
///
/// Throws std::invalid_argument with a line number on malformed input.
HandSkeleton parse_skeleton(std::string_view text);
HandSkeleton load_skeleton(const std::string& path);
std::string format_skeleton(const HandSkeleton& skeleton);

/// Bundled 21-joint rest skeleton (MANO joint order, metres, wrist at the
/// origin, fingers along +x, palm facing -z).
HandSkeleton default_rest_skeleton();
std::string_view default_rest_skeleton_text();

}  // namespace ddf
