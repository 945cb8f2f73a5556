#pragma once

#include <cstddef>
#include <vector>

#include "ddf/common/types.hpp"

namespace ddf {

/// Points in wrist-frame units; `mm_per_unit` converts them to millimetres
/// for metric computation.
struct PointCloud {
  std::vector<Vec3> points;
  double mm_per_unit = 1.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Throws std::invalid_argument for a non-finite point or scale <= 0.
  void validate() const;
};

}  // namespace ddf
