#pragma once

#include <cstdint>
#include <vector>

#include "ddf/geometry/bvh.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf {

/// Origins i.i.d. uniform in `bounds`, directions i.i.d. uniform on the
/// sphere. Origins and directions draw from separate streams of `seed`.
/// Throws std::invalid_argument for n == 0 or invalid bounds.
std::vector<Ray> sample_rays_uniform(const BoundingVolume& bounds, std::size_t n,
                                     std::uint64_t seed);

/// Mixture sampler: a `near_fraction` share of origins are surface points
/// displaced uniformly within a ball of radius `band`, kept only if inside
/// `bounds`; the rest are uniform in the box. Directions stay uniform.
std::vector<Ray> sample_rays_surface_biased(const TriangleMesh& mesh, const BoundingVolume& bounds,
                                            std::size_t n, std::uint64_t seed,
                                            double near_fraction = 0.5, double band = 0.1);

/// n symmetry pairs whose common origin is uniform over the part of `plane`
/// inside `bounds` and whose second direction mirrors the first.
/// Throws std::invalid_argument for a zero normal or when the plane misses
/// the box.
std::vector<SymmetryPair> make_symmetry_pairs(const Plane& plane, const BoundingVolume& bounds,
                                              std::size_t n, std::uint64_t seed);

/// Mirror partner of a single direction.
Ray mirror_partner(const Plane& plane, const Ray& ray);

/// Express a ray in the wrist frame: origin' = R P + t, direction' = R theta.
Ray normalize_to_wrist(const Ray& ray, const RigidTransform& transform);

/// Cast every ray against the mesh. Output order follows input order for
/// any `threads` value; `threads` <= 1 runs inline.
std::vector<DdfSample> generate_ground_truth(const TriangleMesh& mesh, const std::vector<Ray>& rays,
                                             unsigned threads = 1);

/// Same as above with a prebuilt caster.
std::vector<DdfSample> generate_ground_truth(const MeshCaster& caster,
                                             const std::vector<Ray>& rays, unsigned threads = 1);

}  // namespace ddf
