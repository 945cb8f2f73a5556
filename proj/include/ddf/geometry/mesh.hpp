#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ddf/common/types.hpp"

namespace ddf {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh. Coordinates are in object (or wrist) frame units.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  /// Throws std::invalid_argument naming the first violated invariant:
  /// face index out of range, repeated index within a face, or a
  /// non-finite vertex coordinate.
  void validate() const;

  std::size_t face_count() const { return faces.size(); }

  std::array<Vec3, 3> triangle(std::size_t f) const {
    return {vertices[faces[f][0]], vertices[faces[f][1]], vertices[faces[f][2]]};
  }

  /// Axis-aligned bounds of all vertices.
  std::pair<Vec3, Vec3> bounds() const;

  double surface_area() const;
};

/// Unsigned distance from a point to a (possibly degenerate) triangle.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Closest point on triangle abc to p (Ericson's region classification).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Twelve-triangle axis-aligned cube [-half, half]^3 with outward winding.
TriangleMesh make_cube(double half = 0.5);

/// Icosphere: icosahedron subdivided `subdivisions` times and projected onto
/// the sphere. Face count is 20 * 4^subdivisions (5120 at 4).
TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions);

/// Apply p -> scale * R p + t to every vertex.
TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation,
                         double scale = 1.0);

}  // namespace ddf
