#pragma once

#include <span>
#include <vector>

#include "ddf/geometry/bvh.hpp"
#include "ddf/nn/model.hpp"
#include "ddf/nn/pipeline.hpp"
#include "ddf/recon/pointcloud.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf {

struct FieldValue {
  double visibility = 0.0;  // probability, exactly 0 or 1 for ground truth
  double depth = 0.0;       // >= 0 whenever visibility > 0
};

/// Queryable directed distance field.
class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  virtual FieldValue evaluate(const Ray& ray) const = 0;
  virtual std::vector<FieldValue> evaluate(std::span<const Ray> rays) const;
};

class MeshField : public FieldEvaluator {
 public:
  explicit MeshField(const TriangleMesh& mesh) : caster_(mesh) {}
  using FieldEvaluator::evaluate;
  FieldValue evaluate(const Ray& ray) const override;

 private:
  MeshCaster caster_;
};

class AnalyticSphereField : public FieldEvaluator {
 public:
  AnalyticSphereField(const Vec3& center, double radius) : center_(center), radius_(radius) {}
  using FieldEvaluator::evaluate;
  FieldValue evaluate(const Ray& ray) const override;

 private:
  Vec3 center_;
  double radius_;
};

/// Trained network plus the conditioning it was trained with.
class NetworkField : public FieldEvaluator {
 public:
  NetworkField(const nn::DdfModel& model, const nn::FeatureContext& context)
      : model_(model), context_(context) {}
  FieldValue evaluate(const Ray& ray) const override;
  std::vector<FieldValue> evaluate(std::span<const Ray> rays) const override;

 private:
  const nn::DdfModel& model_;
  const nn::FeatureContext& context_;
};

inline constexpr double kDefaultVisibilityThreshold = 0.5;

/// Emits origin + depth * direction for every ray whose visibility exceeds
/// `vis_threshold`, in input order. Throws std::invalid_argument unless
/// 0 < vis_threshold < 1.
PointCloud ddf_to_pointcloud(const FieldEvaluator& field, std::span<const Ray> rays,
                             double vis_threshold = kDefaultVisibilityThreshold,
                             double mm_per_unit = 1.0);

/// n quasi-uniform unit directions on a Fibonacci spiral.
std::vector<Vec3> fibonacci_directions(int n);

struct MeshExtractionOptions {
  int grid_resolution = 48;  // grid nodes per axis
  int directions_per_point = 32;
  double iso = -1.0;  // negative selects 0.005 * box diagonal
  double vis_threshold = kDefaultVisibilityThreshold;
};

/// Samples u(x) = min over directions of the visible depth on a grid over
/// `bounds` and extracts the u = iso level set with marching cubes. The
/// result may have zero faces when iso exceeds the field's range.
/// Throws std::invalid_argument for bad options and std::runtime_error
/// ("empty field") when no sampled ray is visible.
TriangleMesh ddf_to_mesh(const FieldEvaluator& field, const BoundingVolume& bounds,
                         const MeshExtractionOptions& options = {});

/// Marching cubes over a scalar grid with `n` nodes per axis spanning
/// [lo, hi]; cells with values below iso are inside. Shared edge vertices
/// are welded.
TriangleMesh marching_cubes(const std::vector<double>& values, int n, const Vec3& lo,
                            const Vec3& hi, double iso);

}  // namespace ddf
