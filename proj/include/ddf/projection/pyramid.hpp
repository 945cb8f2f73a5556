#pragma once

#include <cstdint>
#include <vector>

#include "ddf/common/types.hpp"
#include "ddf/geometry/mesh.hpp"
#include "ddf/projection/camera.hpp"

namespace ddf {

using FeatureVector = std::vector<double>;

/// Row-major H x W x C grid. Node (x, y) sits at integer pixel coordinates.
struct FeatureGrid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  FeatureGrid() = default;
  FeatureGrid(int h, int w, int c) : height(h), width(w), channels(c), data(std::size_t(h) * w * c) {}

  double& at(int y, int x, int c) { return data[(std::size_t(y) * width + x) * channels + c]; }
  double at(int y, int x, int c) const { return data[(std::size_t(y) * width + x) * channels + c]; }
};

/// Multi-resolution stack; level 0 is the finest. Query points are given in
/// level-0 pixel coordinates.
struct FeaturePyramid {
  std::vector<FeatureGrid> levels;

  /// Throws std::invalid_argument for an empty pyramid, inconsistent
  /// data sizes, non-finite values or a level that is not the half
  /// resolution (rounded up) of its predecessor.
  void validate() const;
  int total_channels() const;
};

/// Per-level bilinear interpolation with clamping, concatenated finest
/// first. Throws std::invalid_argument for an empty pyramid.
FeatureVector bilinear_sample(const FeaturePyramid& pyramid, const Vec2& point);

/// Resolution of level `l` given the finest size (each level halves,
/// rounding up).
std::pair<int, int> level_size(int height, int width, int level);

struct SyntheticPyramidOptions {
  int height = 64;
  int width = 64;
  int levels = 5;
  double noise_amplitude = 0.1;
  int noise_cells = 4;
  std::uint64_t seed = 0;
};

/// Deterministic stand-in for image-encoder features. Each level carries
/// four channels: x / width, y / height, seeded smooth value noise, and the
/// mesh silhouette seen from `camera` (1 where the viewing ray hits).
FeaturePyramid make_synthetic_pyramid(const TriangleMesh& mesh, const CameraPose& camera,
                                      const SyntheticPyramidOptions& options);

inline constexpr int kSyntheticChannelsPerLevel = 4;

/// Inputs to the attention aggregation for one ray.
struct RayFeatureInputs {
  FeatureVector query;                   // feature at the projected origin
  std::vector<FeatureVector> along_ray;  // K_l features, empty when degenerate
  bool degenerate = false;
};

RayFeatureInputs collect_ray_feature_inputs(const FeaturePyramid& pyramid,
                                            const CameraPose& camera, const Ray& ray,
                                            int samples_along_ray, double spacing);

}  // namespace ddf
