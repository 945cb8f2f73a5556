#pragma once

#include <span>
#include <vector>

namespace ddf::nn {

/// NeRF-style encoding, grouped per component:
/// [x_i, sin(2^0 pi x_i), cos(2^0 pi x_i), ..., sin(2^{B-1} pi x_i), cos(2^{B-1} pi x_i)]
/// for each component i. Output length is d * (2 * bands + 1).
std::vector<double> positional_encode(std::span<const double> x, int bands);

/// Writes the encoding into `out` (length d * (2 * bands + 1)).
void positional_encode_into(std::span<const double> x, int bands, std::span<double> out);

}  // namespace ddf::nn
