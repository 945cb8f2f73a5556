#include "ddf/sampling/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ddf/common/rng.hpp"

namespace ddf {
namespace {

Vec3 uniform_in_box(Rng& rng, const BoundingVolume& b) {
  return {rng.uniform(b.min.x(), b.max.x()), rng.uniform(b.min.y(), b.max.y()),
          rng.uniform(b.min.z(), b.max.z())};
}

void require_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ray count must be >= 1");
}

}  // namespace

std::vector<Ray> sample_rays_uniform(const BoundingVolume& bounds, std::size_t n,
                                     std::uint64_t seed) {
  require_count(n);
  bounds.validate();
  Rng origins = make_rng(seed, RngStream::kRayOrigins);
  Rng directions = make_rng(seed, RngStream::kRayDirections);
  std::vector<Ray> rays(n);
  for (auto& r : rays) {
    r.origin = uniform_in_box(origins, bounds);
    r.direction = directions.unit_vector();
  }
  return rays;
}

std::vector<Ray> sample_rays_surface_biased(const TriangleMesh& mesh, const BoundingVolume& bounds,
                                            std::size_t n, std::uint64_t seed,
                                            double near_fraction, double band) {
  require_count(n);
  bounds.validate();
  if (mesh.faces.empty()) throw std::invalid_argument("empty mesh");
  if (!(near_fraction >= 0.0 && near_fraction <= 1.0)) {
    throw std::invalid_argument("near_fraction must lie in [0, 1]");
  }
  if (!(band >= 0.0)) throw std::invalid_argument("band must be non-negative");

  // Area-weighted face CDF.
  std::vector<double> cdf(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    total += 0.5 * (b - a).cross(c - a).norm();
    cdf[f] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("mesh has zero surface area");

  Rng origins = make_rng(seed, RngStream::kRayOrigins);
  Rng directions = make_rng(seed, RngStream::kRayDirections);
  Rng surface = make_rng(seed, RngStream::kSurfaceBias);
  std::vector<Ray> rays(n);
  for (auto& r : rays) {
    r.direction = directions.unit_vector();
    if (surface.uniform() >= near_fraction) {
      r.origin = uniform_in_box(origins, bounds);
      continue;
    }
    for (;;) {
      const double pick = surface.uniform() * total;
      const auto f = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin(),
                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      const auto [a, b, c] = mesh.triangle(f);
      double u = surface.uniform();
      double v = surface.uniform();
      if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
      }
      const Vec3 on_surface = a + u * (b - a) + v * (c - a);
      const double radius = band * std::cbrt(surface.uniform());
      const Vec3 p = on_surface + radius * surface.unit_vector();
      if (bounds.contains(p)) {
        r.origin = p;
        break;
      }
    }
  }
  return rays;
}

Ray mirror_partner(const Plane& plane, const Ray& ray) {
  return {ray.origin, plane.reflect_direction(ray.direction).normalized()};
}

std::vector<SymmetryPair> make_symmetry_pairs(const Plane& plane, const BoundingVolume& bounds,
                                              std::size_t n, std::uint64_t seed) {
  require_count(n);
  bounds.validate();
  const double len = plane.normal.norm();
  if (!(len > 0.0)) throw std::invalid_argument("symmetry plane normal is zero");
  const Plane unit{plane.point, plane.normal / len};

  Rng rng = make_rng(seed, RngStream::kSymmetryPairs);
  std::vector<SymmetryPair> pairs;
  pairs.reserve(n);
  constexpr int kMaxAttempts = 100000;
  int misses = 0;
  while (pairs.size() < n) {
    const Vec3 origin = unit.project(uniform_in_box(rng, bounds));
    const Vec3 dir = rng.unit_vector();
    if (!bounds.contains(origin, 1e-12)) {
      if (++misses > kMaxAttempts) {
        throw std::invalid_argument("symmetry plane does not cross the bounding volume");
      }
      continue;
    }
    misses = 0;
    const Ray a{origin, dir};
    pairs.push_back({a, mirror_partner(unit, a), unit});
  }
  return pairs;
}

Ray normalize_to_wrist(const Ray& ray, const RigidTransform& transform) {
  return {transform.apply_point(ray.origin), transform.apply_vector(ray.direction)};
}

std::vector<DdfSample> generate_ground_truth(const MeshCaster& caster,
                                             const std::vector<Ray>& rays, unsigned threads) {
  std::vector<DdfSample> out(rays.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i].ray = rays[i];
      if (auto hit = caster.cast(rays[i].origin, rays[i].direction)) out[i].depth = hit->t;
    }
  };
  for (const auto& r : rays) validate_ray(r);
  if (threads <= 1 || rays.size() < 2 * threads) {
    work(0, rays.size());
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (rays.size() + threads - 1) / threads;
  for (unsigned k = 0; k < threads; ++k) {
    const std::size_t begin = k * chunk;
    const std::size_t end = std::min(rays.size(), begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();  // joins
  return out;
}

std::vector<DdfSample> generate_ground_truth(const TriangleMesh& mesh, const std::vector<Ray>& rays,
                                             unsigned threads) {
  const MeshCaster caster(mesh);
  return generate_ground_truth(caster, rays, threads);
}

}  // namespace ddf
