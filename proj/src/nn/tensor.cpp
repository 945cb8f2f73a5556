#include "ddf/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace ddf::nn {

std::size_t shape_product(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(shape_product(shape), 0.0f) {}

void Tensor::validate(const std::string& name) const {
  if (data.size() != shape_product(shape)) {
    throw std::invalid_argument(name + ": data length does not match shape");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument(name + ": non-finite value");
  }
}

}  // namespace ddf::nn
