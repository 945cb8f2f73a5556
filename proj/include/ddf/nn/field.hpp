#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddf/nn/model.hpp"
#include "ddf/projection/pyramid.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::nn {

/// Everything the network consumes for one ray (wrist frame).
struct RayInput {
  Ray ray;
  RayFeatureInputs image;           // F_p and the K_l along-ray features
  std::vector<double> hand_global;  // F^G_3D, 6 per joint
  std::vector<double> hand_local;   // F^L_3D, 3 per selected joint
};

struct Prediction {
  double visibility_logit = 0.0;
  double depth = 0.0;  // softplus output, >= 0

  double visibility() const;
};

/// Batched forward evaluation that records the activations needed for
/// reverse-mode differentiation.
class ForwardPass {
 public:
  /// Throws std::invalid_argument when an input's feature sizes do not
  /// match the model configuration or a value is not finite.
  void run(const DdfModel& model, std::span<const RayInput* const> inputs);

  std::size_t size() const { return static_cast<std::size_t>(batch_); }
  Prediction prediction(std::size_t i) const { return {logit_(i), depth_(i)}; }

  /// Accumulate d(loss)/d(parameter) into `grads` (canonical parameter
  /// order) given d(loss)/d(logit) and d(loss)/d(depth) per batch column.
  void backward(const DdfModel& model, std::span<const double> d_logit,
                std::span<const double> d_depth, Gradients& grads) const;

  /// Sign pattern of every ReLU pre-activation. Two evaluations with the
  /// same pattern lie on one smooth piece of the network.
  std::vector<bool> relu_pattern() const;

 private:
  int batch_ = 0;
  int keys_ = 0;
  std::vector<int> key_offset_;
  std::vector<int> key_count_;
  Eigen::MatrixXd fp_;    // C x B query features
  Eigen::MatrixXd fl_;    // C x M along-ray features, M = total keys
  Eigen::MatrixXd q_;     // C x B
  Eigen::MatrixXd k_;     // C x M
  Eigen::MatrixXd v_;     // C x M
  Eigen::MatrixXd attn_;  // heads x M softmax weights
  Eigen::MatrixXd o_;     // C x B attended values (zero for degenerate rays)
  std::vector<Eigen::MatrixXd> layer_in_;
  std::vector<Eigen::MatrixXd> pre_;
  std::vector<Eigen::MatrixXd> post_;
  Eigen::RowVectorXd logit_;
  Eigen::RowVectorXd dist_pre_;
  Eigen::RowVectorXd depth_;
};

/// Convenience: predictions only.
std::vector<Prediction> predict(const DdfModel& model, std::span<const RayInput* const> inputs);
Prediction predict(const DdfModel& model, const RayInput& input);

/// forward(net, ray, F_2D, F_G, F_L) with a precomputed 2D feature; the
/// attention block is bypassed.
Prediction forward_features(const DdfModel& model, const Ray& ray, std::span<const double> f_2d,
                            std::span<const double> f_global, std::span<const double> f_local);

}  // namespace ddf::nn
