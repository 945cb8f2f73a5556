#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ddf/nn/adam.hpp"
#include "ddf/nn/field.hpp"
#include "ddf/nn/loss.hpp"

namespace ddf::nn {

struct TrainingSample {
  RayInput input;
  LossTarget target;
};

struct PairInput {
  RayInput a;
  RayInput b;
};

struct TrainConfig {
  int epochs = 100;
  int batch = 512;
  double learning_rate = 1e-4;
  double lambda1 = kDefaultLambda1;
  double lambda2 = kDefaultLambda2;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double l_depth = 0.0;
  double l_vis = 0.0;
  double l_sym = 0.0;
  double total = 0.0;
};

/// One minibatch: forward the samples and both members of every pair in a
/// single pass, evaluate the loss and return its parameter gradients.
struct BatchView {
  std::vector<const RayInput*> inputs;
  std::vector<LossTarget> targets;
  std::vector<std::pair<const RayInput*, const RayInput*>> pairs;
};

LossBreakdown compute_gradients(const DdfModel& model, const BatchView& batch, double lambda1,
                                double lambda2, Gradients& grads);

/// Mini-batch Adam training. Samples are reshuffled every epoch from a
/// stream of `config.seed`; pairs are reshuffled from their own stream and
/// consumed `batch` at a time, cycling when exhausted. With lambda2 == 0
/// pairs are ignored entirely. Deterministic for a given seed.
/// Throws std::invalid_argument for an empty dataset.
std::vector<EpochLog> train(DdfModel& model, const std::vector<TrainingSample>& samples,
                            const std::vector<PairInput>& pairs, const TrainConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace ddf::nn
