#include "ddf/recon/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "ddf/geometry/intersect.hpp"
#include "ddf/nn/field.hpp"
#include "ddf/recon/mc_tables.hpp"

namespace ddf {

std::vector<FieldValue> FieldEvaluator::evaluate(std::span<const Ray> rays) const {
  std::vector<FieldValue> out;
  out.reserve(rays.size());
  for (const auto& r : rays) out.push_back(evaluate(r));
  return out;
}

FieldValue MeshField::evaluate(const Ray& ray) const {
  const auto hit = caster_.cast(ray.origin, ray.direction);
  if (!hit) return {};
  return {1.0, hit->t};
}

FieldValue AnalyticSphereField::evaluate(const Ray& ray) const {
  const auto s = analytic_sphere_ddf(center_, radius_, ray.origin, ray.direction);
  if (!s.depth) return {};
  return {1.0, *s.depth};
}

FieldValue NetworkField::evaluate(const Ray& ray) const {
  const auto p = nn::predict(model_, context_.make_input(ray));
  return {p.visibility(), p.depth};
}

std::vector<FieldValue> NetworkField::evaluate(std::span<const Ray> rays) const {
  constexpr std::size_t kChunk = 1024;
  std::vector<FieldValue> out;
  out.reserve(rays.size());
  std::vector<nn::RayInput> inputs;
  std::vector<const nn::RayInput*> ptrs;
  for (std::size_t lo = 0; lo < rays.size(); lo += kChunk) {
    const std::size_t hi = std::min(rays.size(), lo + kChunk);
    inputs.clear();
    ptrs.clear();
    for (std::size_t i = lo; i < hi; ++i) inputs.push_back(context_.make_input(rays[i]));
    for (const auto& in : inputs) ptrs.push_back(&in);
    for (const auto& p : nn::predict(model_, ptrs)) out.push_back({p.visibility(), p.depth});
  }
  return out;
}

PointCloud ddf_to_pointcloud(const FieldEvaluator& field, std::span<const Ray> rays,
                             double vis_threshold, double mm_per_unit) {
  if (!(vis_threshold > 0.0 && vis_threshold < 1.0)) {
    throw std::invalid_argument("visibility threshold must lie in (0, 1)");
  }
  PointCloud cloud;
  cloud.mm_per_unit = mm_per_unit;
  const auto values = field.evaluate(rays);
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (values[i].visibility > vis_threshold) {
      cloud.points.push_back(rays[i].at(values[i].depth));
    }
  }
  return cloud;
}

std::vector<Vec3> fibonacci_directions(int n) {
  if (n < 1) throw std::invalid_argument("need at least one direction");
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

TriangleMesh marching_cubes(const std::vector<double>& values, int n, const Vec3& lo,
                            const Vec3& hi, double iso) {
  using detail::kMcCorner;
  using detail::kMcEdge;
  if (n < 2 || values.size() != static_cast<std::size_t>(n) * n * n) {
    throw std::invalid_argument("grid size does not match values");
  }
  const Vec3 step = (hi - lo) / (n - 1);
  auto node = [n](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * n + y) * n + x;
  };
  auto position = [&](int x, int y, int z) {
    return Vec3(lo.x() + x * step.x(), lo.y() + y * step.y(), lo.z() + z * step.z());
  };

  TriangleMesh mesh;
  std::unordered_map<std::uint64_t, std::uint32_t> welded;
  for (int z = 0; z + 1 < n; ++z) {
    for (int y = 0; y + 1 < n; ++y) {
      for (int x = 0; x + 1 < n; ++x) {
        std::size_t id[8];
        double v[8];
        int config = 0;
        for (int c = 0; c < 8; ++c) {
          id[c] = node(x + kMcCorner[c][0], y + kMcCorner[c][1], z + kMcCorner[c][2]);
          v[c] = values[id[c]];
          if (v[c] < iso) config |= 1 << c;
        }
        const auto& tris = detail::kMcTriangles[config];
        for (int k = 0; k < 16 && tris[k] >= 0; k += 3) {
          Face face;
          for (int j = 0; j < 3; ++j) {
            const int a = kMcEdge[tris[k + j]][0];
            const int b = kMcEdge[tris[k + j]][1];
            const std::size_t ia = std::min(id[a], id[b]);
            const std::size_t ib = std::max(id[a], id[b]);
            const std::uint64_t key = static_cast<std::uint64_t>(ia) * values.size() + ib;
            auto [it, fresh] = welded.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
            if (fresh) {
              const Vec3 pa = position(x + kMcCorner[a][0], y + kMcCorner[a][1], z + kMcCorner[a][2]);
              const Vec3 pb = position(x + kMcCorner[b][0], y + kMcCorner[b][1], z + kMcCorner[b][2]);
              const double s = (iso - v[a]) / (v[b] - v[a]);
              mesh.vertices.push_back(pa + std::clamp(s, 0.0, 1.0) * (pb - pa));
            }
            face[j] = it->second;
          }
          if (face[0] != face[1] && face[1] != face[2] && face[0] != face[2]) {
            mesh.faces.push_back(face);
          }
        }
      }
    }
  }
  return mesh;
}

TriangleMesh ddf_to_mesh(const FieldEvaluator& field, const BoundingVolume& bounds,
                         const MeshExtractionOptions& options) {
  if (options.grid_resolution < 8) throw std::invalid_argument("grid resolution must be >= 8");
  if (options.directions_per_point < 6) {
    throw std::invalid_argument("need at least 6 directions per point");
  }
  bounds.validate();
  const int n = options.grid_resolution;
  const double iso = options.iso < 0.0 ? 0.005 * bounds.diagonal() : options.iso;
  const auto dirs = fibonacci_directions(options.directions_per_point);
  // Nodes with no visible direction get a finite cap well above any depth
  // inside the volume so interpolation stays defined.
  const double cap = 2.0 * bounds.diagonal();
  const Vec3 step = bounds.extent() / (n - 1);

  std::vector<double> u(static_cast<std::size_t>(n) * n * n, cap);
  bool any_visible = false;
  std::vector<Ray> rays(dirs.size());
  for (int z = 0; z < n; ++z) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const Vec3 p = bounds.min + Vec3(x * step.x(), y * step.y(), z * step.z());
        for (std::size_t d = 0; d < dirs.size(); ++d) rays[d] = {p, dirs[d]};
        double best = cap;
        for (const auto& value : field.evaluate(rays)) {
          if (value.visibility > options.vis_threshold) {
            any_visible = true;
            best = std::min(best, value.depth);
          }
        }
        u[(static_cast<std::size_t>(z) * n + y) * n + x] = best;
      }
    }
  }
  if (!any_visible) throw std::runtime_error("empty field");
  return marching_cubes(u, n, bounds.min, bounds.max, iso);
}

}  // namespace ddf
