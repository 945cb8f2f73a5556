#include "ddf/geometry/bvh.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ddf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  Vec3 lo = Vec3::Constant(kInf);
  Vec3 hi = Vec3::Constant(-kInf);

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Box& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return lo.x() > hi.x(); }
  double half_area() const {
    if (empty()) return 0.0;
    const Vec3 d = hi - lo;
    return d.x() * d.y() + d.y() * d.z() + d.z() * d.x();
  }
};

struct Builder {
  const TriangleMesh& mesh;
  std::vector<Box> face_boxes;
  std::vector<Vec3> centroids;
  std::vector<std::uint32_t>& order;
  std::vector<Bvh::Node>& nodes;

  double pad = -1.0;

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    Box bounds;
    Box centroid_bounds;
    for (auto i = begin; i < end; ++i) {
      bounds.extend(face_boxes[order[i]]);
      centroid_bounds.extend(centroids[order[i]]);
    }
    const auto index = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({});
    // Pad so that rounding in the slab test can never reject a face whose
    // own intersection test would accept it. One pad from the root bounds
    // keeps child boxes nested in their parents.
    if (pad < 0.0) {
      pad = 1e-9 * (1.0 + (bounds.hi - bounds.lo).cwiseAbs().maxCoeff() +
                    bounds.lo.cwiseAbs().maxCoeff() + bounds.hi.cwiseAbs().maxCoeff());
    }
    nodes[index].box_min = bounds.lo - Vec3::Constant(pad);
    nodes[index].box_max = bounds.hi + Vec3::Constant(pad);

    const std::uint32_t count = end - begin;
    if (count <= Bvh::kMaxLeafSize) {
      nodes[index].first = begin;
      nodes[index].count = count;
      return index;
    }

    const std::uint32_t mid = split(begin, end, centroid_bounds);
    build(begin, mid);
    const auto right = build(mid, end);
    nodes[index].right = right;
    return index;
  }

  // Binned SAH split. Falls back to an index-median split when every
  // centroid coincides or no bin boundary separates the faces.
  std::uint32_t split(std::uint32_t begin, std::uint32_t end, const Box& centroid_bounds) {
    constexpr int kBins = Bvh::kBins;
    double best_cost = kInf;
    int best_axis = -1;
    int best_bin = -1;
    for (int axis = 0; axis < 3; ++axis) {
      const double lo = centroid_bounds.lo[axis];
      const double extent = centroid_bounds.hi[axis] - lo;
      if (!(extent > 0.0)) continue;
      std::array<Box, kBins> bin_boxes{};
      std::array<std::uint32_t, kBins> bin_counts{};
      for (auto i = begin; i < end; ++i) {
        const int b = bin_of(centroids[order[i]][axis], lo, extent);
        bin_boxes[b].extend(face_boxes[order[i]]);
        ++bin_counts[b];
      }
      std::array<double, kBins - 1> left_cost{};
      Box acc;
      std::uint32_t n = 0;
      for (int b = 0; b < kBins - 1; ++b) {
        acc.extend(bin_boxes[b]);
        n += bin_counts[b];
        left_cost[b] = acc.half_area() * n;
      }
      acc = Box{};
      n = 0;
      for (int b = kBins - 1; b > 0; --b) {
        acc.extend(bin_boxes[b]);
        n += bin_counts[b];
        const double cost = left_cost[b - 1] + acc.half_area() * n;
        const std::uint32_t left_n = (end - begin) - n;
        if (left_n == 0 || n == 0) continue;
        if (cost < best_cost) {
          best_cost = cost;
          best_axis = axis;
          best_bin = b;
        }
      }
    }
    if (best_axis < 0) return begin + (end - begin) / 2;

    const double lo = centroid_bounds.lo[best_axis];
    const double extent = centroid_bounds.hi[best_axis] - lo;
    auto* first = order.data() + begin;
    auto* last = order.data() + end;
    auto* mid = std::stable_partition(first, last, [&](std::uint32_t f) {
      return bin_of(centroids[f][best_axis], lo, extent) < best_bin;
    });
    return static_cast<std::uint32_t>(mid - order.data());
  }

  static int bin_of(double value, double lo, double extent) {
    const int b = static_cast<int>(Bvh::kBins * ((value - lo) / extent));
    return std::clamp(b, 0, Bvh::kBins - 1);
  }
};

// Entry distance of the ray into the box, or +inf on a miss.
double slab_entry(const Vec3& lo, const Vec3& hi, const Vec3& origin, const Vec3& inv_dir,
                  double t_max) {
  double t_near = 0.0;
  double t_far = t_max;
  for (int a = 0; a < 3; ++a) {
    if (std::isinf(inv_dir[a])) {
      if (origin[a] < lo[a] || origin[a] > hi[a]) return kInf;
      continue;
    }
    double t0 = (lo[a] - origin[a]) * inv_dir[a];
    double t1 = (hi[a] - origin[a]) * inv_dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1 * (1.0 + 1e-12));
    if (t_near > t_far) return kInf;
  }
  return t_near;
}

bool better(double t, std::uint32_t face, const std::optional<RayHit>& best) {
  return !best || t < best->t || (t == best->t && face < best->face);
}

}  // namespace

Bvh Bvh::build(const TriangleMesh& mesh) {
  if (mesh.faces.empty()) throw std::invalid_argument("empty mesh");
  mesh.validate();

  Bvh bvh;
  const auto n = mesh.faces.size();
  bvh.face_order_.resize(n);
  std::iota(bvh.face_order_.begin(), bvh.face_order_.end(), 0u);

  Builder builder{mesh, {}, {}, bvh.face_order_, bvh.nodes_};
  builder.face_boxes.resize(n);
  builder.centroids.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    builder.face_boxes[f].extend(a);
    builder.face_boxes[f].extend(b);
    builder.face_boxes[f].extend(c);
    builder.centroids[f] = (a + b + c) / 3.0;
  }
  bvh.nodes_.reserve(2 * n);
  builder.build(0, static_cast<std::uint32_t>(n));
  return bvh;
}

std::optional<RayHit> Bvh::cast(const TriangleMesh& mesh, const Vec3& origin,
                                const Vec3& direction) const {
  require_unit_direction(direction);
  const Vec3 inv_dir(1.0 / direction.x(), 1.0 / direction.y(), 1.0 / direction.z());

  std::optional<RayHit> best;
  std::vector<std::uint32_t> stack;
  stack.reserve(64);
  if (slab_entry(nodes_[0].box_min, nodes_[0].box_max, origin, inv_dir, kInf) == kInf) {
    return std::nullopt;
  }
  stack.push_back(0);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const double limit = best ? best->t : kInf;
    if (slab_entry(node.box_min, node.box_max, origin, inv_dir, limit) == kInf) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t f = face_order_[i];
        const auto [a, b, c] = mesh.triangle(f);
        if (auto t = ray_triangle_intersect_unchecked(origin, direction, a, b, c)) {
          if (better(*t, f, best)) best = RayHit{*t, f, origin + *t * direction};
        }
      }
      continue;
    }
    const std::uint32_t left = static_cast<std::uint32_t>(&node - nodes_.data()) + 1;
    const std::uint32_t right = node.right;
    const double t_left =
        slab_entry(nodes_[left].box_min, nodes_[left].box_max, origin, inv_dir, limit);
    const double t_right =
        slab_entry(nodes_[right].box_min, nodes_[right].box_max, origin, inv_dir, limit);
    // Push the farther child first so the nearer one is popped next.
    if (t_left <= t_right) {
      if (t_right != kInf) stack.push_back(right);
      if (t_left != kInf) stack.push_back(left);
    } else {
      if (t_left != kInf) stack.push_back(left);
      if (t_right != kInf) stack.push_back(right);
    }
  }
  return best;
}

std::optional<RayHit> brute_force_cast(const TriangleMesh& mesh, const Vec3& origin,
                                       const Vec3& direction) {
  require_unit_direction(direction);
  std::optional<RayHit> best;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto [a, b, c] = mesh.triangle(f);
    if (auto t = ray_triangle_intersect_unchecked(origin, direction, a, b, c)) {
      const auto face = static_cast<std::uint32_t>(f);
      if (better(*t, face, best)) best = RayHit{*t, face, origin + *t * direction};
    }
  }
  return best;
}

}  // namespace ddf
