#include "ddf/nn/train.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ddf/common/rng.hpp"

namespace ddf::nn {
namespace {

void shuffle(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
}

}  // namespace

LossBreakdown compute_gradients(const DdfModel& model, const BatchView& batch, double lambda1,
                                double lambda2, Gradients& grads) {
  const std::size_t n = batch.inputs.size();
  const std::size_t m = batch.pairs.size();
  std::vector<const RayInput*> all = batch.inputs;
  all.reserve(n + 2 * m);
  for (const auto& p : batch.pairs) all.push_back(p.first);
  for (const auto& p : batch.pairs) all.push_back(p.second);

  ForwardPass pass;
  pass.run(model, all);
  std::vector<Prediction> preds(n);
  for (std::size_t i = 0; i < n; ++i) preds[i] = pass.prediction(i);
  std::vector<std::pair<double, double>> pair_depths(m);
  for (std::size_t k = 0; k < m; ++k) {
    pair_depths[k] = {pass.prediction(n + k).depth, pass.prediction(n + m + k).depth};
  }

  LossGradient lg;
  const LossBreakdown loss = compute_loss(preds, batch.targets, pair_depths, lambda1, lambda2, &lg);
  std::vector<double> d_logit(n + 2 * m, 0.0);
  std::vector<double> d_depth(n + 2 * m, 0.0);
  std::copy(lg.d_logit.begin(), lg.d_logit.end(), d_logit.begin());
  std::copy(lg.d_depth.begin(), lg.d_depth.end(), d_depth.begin());
  for (std::size_t k = 0; k < m; ++k) {
    d_depth[n + k] = lg.d_pairs[k].first;
    d_depth[n + m + k] = lg.d_pairs[k].second;
  }
  for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
  pass.backward(model, d_logit, d_depth, grads);
  return loss;
}

std::vector<EpochLog> train(DdfModel& model, const std::vector<TrainingSample>& samples,
                            const std::vector<PairInput>& pairs, const TrainConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch) {
  if (samples.empty()) throw std::invalid_argument("empty dataset");
  if (config.batch < 1 || config.epochs < 0) throw std::invalid_argument("invalid batch or epochs");
  model.validate();

  Rng shuffle_rng = make_rng(config.seed, RngStream::kShuffle);
  Rng pair_rng = make_rng(config.seed, RngStream::kPairShuffle);
  const bool use_pairs = config.lambda2 != 0.0 && !pairs.empty();

  AdamState adam = AdamState::for_model(model, config.learning_rate);
  Gradients grads = zero_gradients(model);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> pair_order(use_pairs ? pairs.size() : 0);
  std::iota(pair_order.begin(), pair_order.end(), std::size_t{0});
  std::size_t pair_cursor = pair_order.size();

  std::vector<EpochLog> log;
  const std::size_t batch = static_cast<std::size_t>(config.batch);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    EpochLog entry;
    entry.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      BatchView view;
      for (std::size_t i = start; i < end; ++i) {
        view.inputs.push_back(&samples[order[i]].input);
        view.targets.push_back(samples[order[i]].target);
      }
      if (use_pairs) {
        const std::size_t want = std::min(batch, pairs.size());
        for (std::size_t k = 0; k < want; ++k) {
          if (pair_cursor == pair_order.size()) {
            shuffle(pair_order, pair_rng);
            pair_cursor = 0;
          }
          const PairInput& p = pairs[pair_order[pair_cursor++]];
          view.pairs.push_back({&p.a, &p.b});
        }
      }
      const LossBreakdown loss =
          compute_gradients(model, view, config.lambda1, config.lambda2, grads);
      adam_step(model.parameters(), grads, adam);
      const double w = static_cast<double>(end - start);
      entry.l_depth += w * loss.l_depth;
      entry.l_vis += w * loss.l_vis;
      entry.l_sym += w * loss.l_sym;
      entry.total += w * loss.total;
    }
    const double n = static_cast<double>(order.size());
    entry.l_depth /= n;
    entry.l_vis /= n;
    entry.l_sym /= n;
    entry.total /= n;
    log.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  return log;
}

}  // namespace ddf::nn
