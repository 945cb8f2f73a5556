#include "ddf/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddf::nn {
namespace {

// Subgradient of |x| with sign(0) = 0.
double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

LossBreakdown compute_loss(std::span<const Prediction> preds, std::span<const LossTarget> targets,
                           std::span<const std::pair<double, double>> pair_depths, double lambda1,
                           double lambda2, LossGradient* gradient) {
  if (preds.size() != targets.size()) {
    throw std::invalid_argument("predictions and targets differ in length");
  }
  if (preds.empty()) throw std::invalid_argument("loss needs at least one prediction");
  const double n = static_cast<double>(preds.size());
  LossBreakdown out;
  out.lambda1 = lambda1;
  out.lambda2 = lambda2;
  if (gradient) {
    gradient->d_logit.assign(preds.size(), 0.0);
    gradient->d_depth.assign(preds.size(), 0.0);
    gradient->d_pairs.assign(pair_depths.size(), {0.0, 0.0});
  }

  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Prediction& p = preds[i];
    const LossTarget& t = targets[i];
    const double xi = t.visible ? 1.0 : 0.0;
    const double prob = p.visibility();
    const double clamped = std::clamp(prob, kBceClamp, 1.0 - kBceClamp);
    out.l_vis -= xi * std::log(clamped) + (1.0 - xi) * std::log(1.0 - clamped);
    const double gate = (t.visible && t.supervise_depth) ? 1.0 : 0.0;
    const double err = p.depth - t.depth;
    if (gate > 0.0) out.l_depth += std::abs(err);
    if (gradient) {
      const bool inside = prob > kBceClamp && prob < 1.0 - kBceClamp;
      gradient->d_logit[i] = inside ? (prob - xi) / n : 0.0;
      gradient->d_depth[i] = lambda1 * gate * sign(err) / n;
    }
  }
  out.l_vis /= n;
  out.l_depth /= n;

  if (!pair_depths.empty()) {
    const double m = static_cast<double>(pair_depths.size());
    for (std::size_t k = 0; k < pair_depths.size(); ++k) {
      const double diff = pair_depths[k].first - pair_depths[k].second;
      out.l_sym += std::abs(diff);
      if (gradient) {
        const double g = lambda2 * sign(diff) / m;
        gradient->d_pairs[k] = {g, -g};
      }
    }
    out.l_sym /= m;
  }
  out.total = out.l_vis + lambda1 * out.l_depth + lambda2 * out.l_sym;
  return out;
}

LossBreakdown compute_loss(std::span<const Prediction> preds, std::span<const DdfSample> gts,
                           std::span<const std::pair<double, double>> pair_depths, double lambda1,
                           double lambda2) {
  std::vector<LossTarget> targets;
  targets.reserve(gts.size());
  for (const auto& s : gts) targets.push_back(LossTarget::from_sample(s));
  return compute_loss(preds, targets, pair_depths, lambda1, lambda2);
}

}  // namespace ddf::nn
