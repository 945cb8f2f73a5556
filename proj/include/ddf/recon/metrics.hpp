#pragma once

#include <cstddef>
#include <string>

#include "ddf/recon/pointcloud.hpp"

namespace ddf {

inline constexpr const char* kChamferConvention = "mean-squared-sum";
inline constexpr const char* kChamferUnits = "mm2";

/// Mean squared nearest-neighbour distance A->B plus B->A, in mm^2.
/// Throws std::invalid_argument for an empty cloud or mismatched scales.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

/// F-score of prediction `a` against ground truth `b`; a point is correct
/// when within `tau_mm` (inclusive) of the other cloud.
double f_score(const PointCloud& a, const PointCloud& b, double tau_mm);

struct MetricsReport {
  double f5 = 0.0;
  double f10 = 0.0;
  double cd = 0.0;
  std::size_t predicted_points = 0;
  std::size_t reference_points = 0;
};

MetricsReport evaluate_clouds(const PointCloud& predicted, const PointCloud& reference);

}  // namespace ddf
