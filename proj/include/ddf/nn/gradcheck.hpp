#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddf/nn/train.hpp"

namespace ddf::nn {

struct ParameterCheck {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

struct GradcheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  // Entries whose finite-difference stencil straddled a ReLU or |.| kink at
  // every step size tried; these have no central difference to compare to.
  std::size_t skipped_at_kink = 0;
  std::vector<ParameterCheck> per_parameter;
};

/// Relative error |a - b| / max(|a|, |b|, floor).
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Compare reverse-mode gradients with central differences of step `h`
/// for every scalar parameter. Float parameters are perturbed in place and
/// the realised step (after rounding to float) is used as the denominator.
/// When the stencil crosses a kink the step is shrunk by 10x (up to twice).
GradcheckReport gradient_check(DdfModel& model, const BatchView& batch, double lambda1,
                               double lambda2, double h = 1e-4);

/// Randomised check on a width-16 network (attention included) with
/// `samples` supervised rays and two symmetry pairs.
GradcheckReport default_gradient_check(std::uint64_t seed, int samples = 8, double h = 1e-4);

}  // namespace ddf::nn
