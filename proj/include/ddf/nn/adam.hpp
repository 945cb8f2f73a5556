#pragma once

#include <cstdint>
#include <vector>

#include "ddf/nn/model.hpp"

namespace ddf::nn {

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  static AdamState for_model(const DdfModel& model, double learning_rate = 1e-4);
};

/// One bias-corrected Adam update. Throws std::invalid_argument when the
/// gradient or moment shapes do not match the parameters.
void adam_step(std::vector<ParameterRef> params, const Gradients& grads, AdamState& state);

}  // namespace ddf::nn
