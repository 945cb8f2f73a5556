#pragma once

#include <cstdint>
#include <vector>

#include "ddf/hand/hand_features.hpp"
#include "ddf/nn/train.hpp"
#include "ddf/projection/camera.hpp"
#include "ddf/projection/pyramid.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::nn {

inline constexpr double kDefaultPixelSpacing = 4.0;

/// Fixed per-scene conditioning: image features, camera and posed hand.
struct FeatureContext {
  FeaturePyramid pyramid;
  CameraPose camera;
  HandSkeleton skeleton;  // posed, wrist frame
  int samples_along_ray = 8;
  double spacing = kDefaultPixelSpacing;
  int k_3d = 8;

  RayInput make_input(const Ray& ray) const;

  /// `base` with the feature sizes this context produces.
  NetworkConfig network_config(NetworkConfig base = {}) const;
};

/// Camera at (0, 0, 3) looking down -z at the origin, focal length equal to
/// the image width so the default volume fills the frame.
CameraPose default_camera(int height = 64, int width = 64);

FeatureContext make_synthetic_context(const TriangleMesh& mesh, const HandPose& pose,
                                      std::uint64_t seed,
                                      const SyntheticPyramidOptions& options = {});

std::vector<TrainingSample> make_training_samples(const FeatureContext& context,
                                                  const std::vector<DdfSample>& samples);

std::vector<PairInput> make_pair_inputs(const FeatureContext& context,
                                        const std::vector<SymmetryPair>& pairs);

}  // namespace ddf::nn
