#include "ddf/nn/encoding.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddf::nn {

void positional_encode_into(std::span<const double> x, int bands, std::span<double> out) {
  if (bands < 0) throw std::invalid_argument("band count must be non-negative");
  const std::size_t per = 2 * static_cast<std::size_t>(bands) + 1;
  if (out.size() != x.size() * per) throw std::invalid_argument("encoding buffer has wrong size");
  std::size_t k = 0;
  for (double v : x) {
    out[k++] = v;
    double freq = std::numbers::pi;
    for (int b = 0; b < bands; ++b) {
      out[k++] = std::sin(freq * v);
      out[k++] = std::cos(freq * v);
      freq *= 2.0;
    }
  }
}

std::vector<double> positional_encode(std::span<const double> x, int bands) {
  if (bands < 0) throw std::invalid_argument("band count must be non-negative");
  std::vector<double> out(x.size() * (2 * static_cast<std::size_t>(bands) + 1));
  positional_encode_into(x, bands, out);
  return out;
}

}  // namespace ddf::nn
