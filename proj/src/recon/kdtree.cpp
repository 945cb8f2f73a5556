#include "ddf/recon/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ddf {
namespace {

bool better(std::size_t index, double d2, const Neighbor& best) {
  return d2 < best.squared_distance || (d2 == best.squared_distance && index < best.index);
}

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("k-d tree needs at least one point");
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(order, 0, order.size(), 0);
}

int KdTree::build(std::vector<std::size_t>& order, std::size_t lo, std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](std::size_t a, std::size_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({order[mid], axis});
  const int left = build(order, lo, mid, depth + 1);
  const int right = build(order, mid + 1, hi, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(int node, const Vec3& query, Neighbor& best) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Vec3& p = points_[n.point];
  const double d2 = (p - query).squaredNorm();
  if (better(n.point, d2, best)) best = {n.point, d2};
  const double diff = query[n.axis] - p[n.axis];
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, query, best);
  // Equality keeps the far side in play so lower-index ties are found.
  if (diff * diff <= best.squared_distance) search(far, query, best);
}

Neighbor KdTree::nearest(const Vec3& query) const {
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  search(root_, query, best);
  return best;
}

Neighbor nearest_exhaustive(const std::vector<Vec3>& points, const Vec3& query) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = (points[i] - query).squaredNorm();
    if (better(i, d2, best)) best = {i, d2};
  }
  return best;
}

}  // namespace ddf
