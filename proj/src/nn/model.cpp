#include "ddf/nn/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ddf/common/rng.hpp"

namespace ddf::nn {
namespace {

Linear make_linear(int in, int out, double bound, Rng& rng) {
  Linear l{Tensor({std::size_t(out), std::size_t(in)}), Tensor({std::size_t(out)})};
  for (auto& w : l.weight.data) w = static_cast<float>(rng.uniform(-bound, bound));
  return l;
}

double he_bound(int fan_in) { return std::sqrt(6.0 / fan_in); }
double linear_bound(int fan_in) { return std::sqrt(3.0 / fan_in); }

void check_linear(const Linear& l, int in, int out, const std::string& name) {
  if (l.weight.shape != std::vector<std::size_t>{std::size_t(out), std::size_t(in)} ||
      l.bias.shape != std::vector<std::size_t>{std::size_t(out)}) {
    throw std::invalid_argument(name + ": expected " + std::to_string(out) + "x" +
                                std::to_string(in) + " weight");
  }
  l.weight.validate(name + ".weight");
  l.bias.validate(name + ".bias");
}

template <typename Model, typename Ref>
std::vector<Ref> collect(Model& m) {
  std::vector<Ref> out;
  auto add = [&](const std::string& name, auto& linear) {
    out.push_back({name + ".weight", &linear.weight});
    out.push_back({name + ".bias", &linear.bias});
  };
  add("attention.query", m.attention.query);
  add("attention.key", m.attention.key);
  add("attention.value", m.attention.value);
  add("attention.output", m.attention.output);
  for (std::size_t i = 0; i < m.network.layers.size(); ++i) {
    add("mlp.layer" + std::to_string(i + 1), m.network.layers[i]);
  }
  add("mlp.visibility", m.network.visibility_head);
  add("mlp.distance", m.network.distance_head);
  return out;
}

}  // namespace

void NetworkConfig::validate() const {
  if (width < 1 || heads < 1 || feature_channels < 1 || samples_along_ray < 1 || k_3d < 1 ||
      joints < 1 || pe_bands_origin < 0 || pe_bands_dir < 0) {
    throw std::invalid_argument("network config sizes must be positive");
  }
  if (feature_channels % heads != 0) {
    throw std::invalid_argument("feature channels must be divisible by the head count");
  }
}

DdfModel DdfModel::initialize(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng = make_rng(seed, RngStream::kInit);
  DdfModel m;
  m.config = config;
  const int c = config.feature_channels;
  m.attention.heads = config.heads;
  m.attention.query = make_linear(c, c, linear_bound(c), rng);
  m.attention.key = make_linear(c, c, linear_bound(c), rng);
  m.attention.value = make_linear(c, c, linear_bound(c), rng);
  m.attention.output = make_linear(c, c, linear_bound(c), rng);

  const int w = config.width;
  for (int layer = 1; layer <= kHiddenLayers; ++layer) {
    int in = w;
    if (layer == 1) in = config.input_dim();
    if (layer == kSkipLayer) in = w + config.skip_dim();
    m.network.layers.push_back(make_linear(in, w, he_bound(in), rng));
  }
  m.network.visibility_head = make_linear(w, 1, linear_bound(w), rng);
  m.network.distance_head = make_linear(w, 1, linear_bound(w), rng);
  return m;
}

std::vector<ParameterRef> DdfModel::parameters() { return collect<DdfModel, ParameterRef>(*this); }

std::vector<ConstParameterRef> DdfModel::parameters() const {
  return collect<const DdfModel, ConstParameterRef>(*this);
}

std::size_t DdfModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor->size();
  return n;
}

void DdfModel::validate() const {
  config.validate();
  const int c = config.feature_channels;
  if (attention.heads != config.heads) throw std::invalid_argument("attention head count mismatch");
  check_linear(attention.query, c, c, "attention.query");
  check_linear(attention.key, c, c, "attention.key");
  check_linear(attention.value, c, c, "attention.value");
  check_linear(attention.output, c, c, "attention.output");
  if (network.layers.size() != kHiddenLayers) {
    throw std::invalid_argument("network must have " + std::to_string(kHiddenLayers) + " layers");
  }
  const int w = config.width;
  for (int layer = 1; layer <= kHiddenLayers; ++layer) {
    int in = w;
    if (layer == 1) in = config.input_dim();
    if (layer == kSkipLayer) in = w + config.skip_dim();
    check_linear(network.layers[layer - 1], in, w, "mlp.layer" + std::to_string(layer));
  }
  check_linear(network.visibility_head, w, 1, "mlp.visibility");
  check_linear(network.distance_head, w, 1, "mlp.distance");
}

Gradients zero_gradients(const DdfModel& model) {
  Gradients g;
  for (const auto& p : model.parameters()) g.emplace_back(p.tensor->size(), 0.0);
  return g;
}

}  // namespace ddf::nn
