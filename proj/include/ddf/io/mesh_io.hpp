#pragma once

#include <iosfwd>
#include <string>

#include "ddf/geometry/mesh.hpp"
#include "ddf/recon/pointcloud.hpp"

namespace ddf::io {

struct ObjLoadResult {
  TriangleMesh mesh;
  double scale = 1.0;            // normalised = (original - center) * scale
  Vec3 center = Vec3::Zero();
};

/// Reads `v` and `f` records; polygons are fan-triangulated, `f a/b/c`
/// forms and negative (relative) indices are accepted, other records are
/// ignored. With `normalize` the mesh is centred and scaled uniformly to fit
/// [-0.9, 0.9]^3. Errors name the offending line.
ObjLoadResult read_obj(std::istream& in, bool normalize = false);
ObjLoadResult load_obj(const std::string& path, bool normalize = false);

void write_obj(std::ostream& out, const TriangleMesh& mesh);
void save_obj(const std::string& path, const TriangleMesh& mesh);

/// ASCII PLY with x y z float properties; the scale factor is stored as a
/// `comment mm_per_unit` line.
void write_ply(std::ostream& out, const PointCloud& cloud);
void save_ply(const std::string& path, const PointCloud& cloud);

/// Reads ASCII and binary_little_endian PLY vertex positions.
PointCloud read_ply(std::istream& in);
PointCloud load_ply(const std::string& path);

}  // namespace ddf::io
