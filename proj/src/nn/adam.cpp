#include "ddf/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ddf::nn {

AdamState AdamState::for_model(const DdfModel& model, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (const auto& p : model.parameters()) {
    s.first_moment.emplace_back(p.tensor->size(), 0.0);
    s.second_moment.emplace_back(p.tensor->size(), 0.0);
  }
  return s;
}

void adam_step(std::vector<ParameterRef> params, const Gradients& grads, AdamState& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw std::invalid_argument("adam: parameter/gradient/moment counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& w = params[k].tensor->data;
    const auto& g = grads[k];
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    if (g.size() != w.size() || m.size() != w.size() || v.size() != w.size()) {
      throw std::invalid_argument("adam: shape mismatch for " + params[k].name);
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double update = state.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.epsilon);
      w[i] = static_cast<float>(static_cast<double>(w[i]) - update);
    }
  }
}

}  // namespace ddf::nn
