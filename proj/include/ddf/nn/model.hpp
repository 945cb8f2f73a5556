#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ddf/nn/tensor.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::nn {

/// Architecture hyper-parameters.
struct NetworkConfig {
  int width = 128;
  int pe_bands_origin = 6;
  int pe_bands_dir = 4;
  int heads = 2;
  int feature_channels = 20;  // C_total of the image feature pyramid
  int samples_along_ray = 8;  // K_l
  int k_3d = 8;               // K_3D
  int joints = 21;            // joints in the global hand embedding

  int origin_encoding_dim() const { return 3 * (2 * pe_bands_origin + 1); }
  int direction_encoding_dim() const { return 3 * (2 * pe_bands_dir + 1); }
  int skip_dim() const { return origin_encoding_dim() + direction_encoding_dim(); }
  int global_dim() const { return 6 * joints; }
  int local_dim() const { return 3 * k_3d; }
  int input_dim() const { return skip_dim() + feature_channels + global_dim() + local_dim(); }

  /// Throws std::invalid_argument for non-positive sizes or
  /// feature_channels not divisible by heads.
  void validate() const;
};

inline constexpr int kHiddenLayers = 8;
inline constexpr int kVisibilityLayer = 3;  // visibility head reads layer-3 activations
inline constexpr int kSkipLayer = 4;        // layer 4 input receives the ray encoding

struct Linear {
  Tensor weight;  // out x in
  Tensor bias;    // out

  int in() const { return static_cast<int>(weight.cols()); }
  int out() const { return static_cast<int>(weight.rows()); }
};

/// Multi-head cross-attention over C_total-dimensional features.
struct AttentionBlock {
  int heads = 2;
  Linear query;
  Linear key;
  Linear value;
  Linear output;

  int channels() const { return query.out(); }
};

/// 8-layer MLP with a visibility head after layer 3, a skip connection of
/// the ray encoding into layer 4 and a softplus distance head.
struct DdfNetwork {
  std::vector<Linear> layers;  // kHiddenLayers entries
  Linear visibility_head;
  Linear distance_head;
};

/// Trainable state: attention block plus MLP.
struct DdfModel {
  NetworkConfig config;
  AttentionBlock attention;
  DdfNetwork network;

  /// Fan-in scaled uniform weights (He bound sqrt(6 / fan_in) for layers
  /// followed by ReLU, sqrt(3 / fan_in) otherwise), zero biases.
  static DdfModel initialize(const NetworkConfig& config, std::uint64_t seed);

  /// Canonical parameter order used by checkpoints, optimizers and
  /// gradient checks.
  std::vector<ParameterRef> parameters();
  std::vector<ConstParameterRef> parameters() const;
  std::size_t parameter_count() const;

  /// Throws std::invalid_argument when shapes do not chain for `config` or
  /// a parameter is not finite.
  void validate() const;
};

Gradients zero_gradients(const DdfModel& model);

}  // namespace ddf::nn
