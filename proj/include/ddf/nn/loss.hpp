#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ddf/nn/field.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::nn {

inline constexpr double kDefaultLambda1 = 5.0;
inline constexpr double kDefaultLambda2 = 0.5;
inline constexpr double kBceClamp = 1e-7;

struct LossBreakdown {
  double l_depth = 0.0;
  double l_vis = 0.0;
  double l_sym = 0.0;
  double total = 0.0;
  double lambda1 = kDefaultLambda1;
  double lambda2 = kDefaultLambda2;
};

/// Supervision for one ray. `supervise_depth = false` withholds the depth
/// term while keeping visibility supervision.
struct LossTarget {
  bool visible = false;
  double depth = 0.0;
  bool supervise_depth = true;

  static LossTarget from_sample(const DdfSample& s) {
    return {s.visible(), s.depth.value_or(0.0), true};
  }
};

/// Per-prediction derivatives of the total loss.
struct LossGradient {
  std::vector<double> d_logit;
  std::vector<double> d_depth;
  std::vector<std::pair<double, double>> d_pairs;  // (dL/dD_a, dL/dD_b)
};

/// L_D = mean(xi * |D_hat - D|) gated by ground-truth visibility,
/// L_xi = mean BCE(sigmoid(logit), xi) with probabilities clamped to
/// [1e-7, 1 - 1e-7], L_s = mean |D_a - D_b| over pairs (0 without pairs),
/// total = L_xi + lambda1 L_D + lambda2 L_s.
/// Throws std::invalid_argument when preds and targets differ in length.
LossBreakdown compute_loss(std::span<const Prediction> preds, std::span<const LossTarget> targets,
                           std::span<const std::pair<double, double>> pair_depths, double lambda1,
                           double lambda2, LossGradient* gradient = nullptr);

LossBreakdown compute_loss(std::span<const Prediction> preds, std::span<const DdfSample> gts,
                           std::span<const std::pair<double, double>> pair_depths, double lambda1,
                           double lambda2);

}  // namespace ddf::nn
