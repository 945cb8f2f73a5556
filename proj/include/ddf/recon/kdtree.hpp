#pragma once

#include <cstddef>
#include <vector>

#include "ddf/common/types.hpp"

namespace ddf {

struct Neighbor {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

/// Exact nearest-neighbour search. Equidistant candidates resolve to the
/// lowest point index, so results match an exhaustive scan exactly.
class KdTree {
 public:
  /// Throws std::invalid_argument for an empty point set.
  explicit KdTree(std::vector<Vec3> points);

  Neighbor nearest(const Vec3& query) const;
  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t point;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<std::size_t>& order, std::size_t lo, std::size_t hi, int depth);
  void search(int node, const Vec3& query, Neighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

Neighbor nearest_exhaustive(const std::vector<Vec3>& points, const Vec3& query);

}  // namespace ddf
