#include "ddf/nn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddf::nn {
namespace {

std::vector<double> affine(const Linear& l, const FeatureVector& x) {
  const int out = l.out();
  const int in = l.in();
  std::vector<double> y(out);
  for (int r = 0; r < out; ++r) {
    double acc = l.bias.data[r];
    for (int c = 0; c < in; ++c) acc += double(l.weight.data[std::size_t(r) * in + c]) * x[c];
    y[r] = acc;
  }
  return y;
}

}  // namespace

FeatureVector aggregate_2d(const AttentionBlock& block, const FeatureVector& query,
                           const std::vector<FeatureVector>& keys, AttentionTrace* trace) {
  const int c = block.channels();
  if (static_cast<int>(query.size()) != c) {
    throw std::invalid_argument("query feature has " + std::to_string(query.size()) +
                                " channels, expected " + std::to_string(c));
  }
  for (const auto& k : keys) {
    if (static_cast<int>(k.size()) != c) throw std::invalid_argument("key feature size mismatch");
  }
  if (trace) trace->weights.assign(block.heads, {});
  if (keys.empty()) return query;

  const int dh = c / block.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto q = affine(block.query, query);
  std::vector<std::vector<double>> kp;
  std::vector<std::vector<double>> vp;
  for (const auto& k : keys) {
    kp.push_back(affine(block.key, k));
    vp.push_back(affine(block.value, k));
  }

  FeatureVector attended(c, 0.0);
  std::vector<double> logits(keys.size());
  for (int h = 0; h < block.heads; ++h) {
    const int lo = h * dh;
    for (std::size_t j = 0; j < keys.size(); ++j) {
      double s = 0.0;
      for (int d = 0; d < dh; ++d) s += q[lo + d] * kp[j][lo + d];
      logits[j] = s * scale;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (auto& l : logits) z += (l = std::exp(l - mx));
    for (auto& l : logits) l /= z;
    for (std::size_t j = 0; j < keys.size(); ++j) {
      for (int d = 0; d < dh; ++d) attended[lo + d] += logits[j] * vp[j][lo + d];
    }
    if (trace) trace->weights[h] = logits;
  }

  const auto projected = affine(block.output, attended);
  FeatureVector out(query);
  for (int i = 0; i < c; ++i) out[i] += projected[i];
  return out;
}

}  // namespace ddf::nn
