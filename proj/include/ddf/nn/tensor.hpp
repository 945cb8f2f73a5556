#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ddf::nn {

/// Row-major float tensor used for trainable parameters.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  /// Throws std::invalid_argument when data.size() != product(shape) or a
  /// value is not finite.
  void validate(const std::string& name = "tensor") const;
};

std::size_t shape_product(std::span<const std::size_t> shape);

/// Non-owning view of one named parameter.
struct ParameterRef {
  std::string name;
  Tensor* tensor;
};

struct ConstParameterRef {
  std::string name;
  const Tensor* tensor;
};

/// Double-precision gradient buffers aligned with a parameter list.
using Gradients = std::vector<std::vector<double>>;

}  // namespace ddf::nn
