#pragma once

#include <vector>

#include "ddf/nn/model.hpp"
#include "ddf/projection/pyramid.hpp"

namespace ddf::nn {

/// Softmax weights of one aggregation, weights[h][j] for head h and key j.
struct AttentionTrace {
  std::vector<std::vector<double>> weights;
};

/// Residual cross-attention over the features sampled along a projected ray:
///
///     F_2D = F_p + W_o concat_h(softmax(q_h k_h^T / sqrt(C / H)) v_h) + b_o
///
/// with q = W_q F_p + b_q and k, v from the along-ray features. An empty key
/// set (degenerate projection) returns F_p unchanged. Throws
/// std::invalid_argument on a dimension mismatch.
FeatureVector aggregate_2d(const AttentionBlock& block, const FeatureVector& query,
                           const std::vector<FeatureVector>& keys, AttentionTrace* trace = nullptr);

}  // namespace ddf::nn
