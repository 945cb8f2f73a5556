#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddf/geometry/intersect.hpp"
#include "ddf/geometry/mesh.hpp"

namespace ddf {

/// Binary bounding volume hierarchy over the faces of a TriangleMesh.
///
/// Built with an 8-bin surface-area heuristic; leaves hold at most
/// kMaxLeafSize faces. The tree references faces through `face_order`, so
/// leaves cover contiguous ranges of that permutation. Immutable after
/// construction and safe to query from several threads.
class Bvh {
 public:
  static constexpr std::size_t kMaxLeafSize = 4;
  static constexpr int kBins = 8;

  struct Node {
    Vec3 box_min;
    Vec3 box_max;
    // Interior: left child is the next node, right child is `right`.
    // Leaf: faces face_order[first, first + count).
    std::uint32_t right = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;

    bool is_leaf() const { return count > 0; }
  };

  /// Throws std::invalid_argument("empty mesh") when the mesh has no faces,
  /// and propagates TriangleMesh::validate errors.
  static Bvh build(const TriangleMesh& mesh);

  /// First hit with minimal t; exact ties go to the lowest face index.
  /// Identical to brute_force_cast on the same mesh.
  std::optional<RayHit> cast(const TriangleMesh& mesh, const Vec3& origin,
                             const Vec3& direction) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& face_order() const { return face_order_; }
  std::size_t face_count() const { return face_order_.size(); }

 private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> face_order_;
};

/// Exhaustive first-hit search over all faces (reference oracle).
std::optional<RayHit> brute_force_cast(const TriangleMesh& mesh, const Vec3& origin,
                                       const Vec3& direction);

/// Convenience: cast_ray(bvh, mesh, ...) == bvh.cast(mesh, ...).
inline std::optional<RayHit> cast_ray(const Bvh& bvh, const TriangleMesh& mesh, const Vec3& origin,
                                      const Vec3& direction) {
  return bvh.cast(mesh, origin, direction);
}

/// A mesh bundled with its acceleration structure.
class MeshCaster {
 public:
  explicit MeshCaster(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(Bvh::build(mesh_)) {}

  std::optional<RayHit> cast(const Vec3& origin, const Vec3& direction) const {
    return bvh_.cast(mesh_, origin, direction);
  }

  const TriangleMesh& mesh() const { return mesh_; }
  const Bvh& bvh() const { return bvh_; }

 private:
  TriangleMesh mesh_;
  Bvh bvh_;
};

}  // namespace ddf
