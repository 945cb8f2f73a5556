#include "ddf/hand/hand_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace ddf {

HandPose HandPose::canonical() const {
  HandPose out = *this;
  for (std::size_t i = 0; i + 2 < theta.size(); i += 3) {
    const Vec3 w(theta[i], theta[i + 1], theta[i + 2]);
    const double angle = w.norm();
    if (angle <= std::numbers::pi) continue;
    const double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
    const Vec3 c = w / angle * wrapped;
    out.theta[i] = c.x();
    out.theta[i + 1] = c.y();
    out.theta[i + 2] = c.z();
  }
  return out;
}

HandSkeleton forward_kinematics(const HandSkeleton& rest, const HandPose& pose) {
  rest.validate();
  const auto articulated = rest.articulated_joints();
  if (pose.theta.size() != 3 * articulated.size()) {
    throw std::invalid_argument("pose has " + std::to_string(pose.theta.size()) +
                                " parameters, expected " +
                                std::to_string(3 * articulated.size()));
  }
  for (double v : pose.theta) {
    if (!std::isfinite(v)) throw std::invalid_argument("pose parameters must be finite");
  }

  const std::size_t n = rest.joint_count();
  std::vector<Mat3> local(n, Mat3::Identity());
  for (std::size_t k = 0; k < articulated.size(); ++k) {
    const int j = articulated[k];
    const Mat3& f = rest.frames[j];
    local[j] = f * axis_angle_to_matrix(pose.joint(k)) * f.transpose();
  }

  // Parents precede children (validated), so one forward sweep suffices.
  std::vector<Mat3> global(n, Mat3::Identity());
  HandSkeleton posed = rest;
  for (std::size_t i = 0; i < n; ++i) {
    const int p = rest.parent[i];
    if (p < 0) {
      global[i] = local[i];
      continue;
    }
    posed.joints[i] = posed.joints[p] + global[p] * (rest.joints[i] - rest.joints[p]);
    global[i] = global[p] * local[i];
    posed.frames[i] = global[i] * rest.frames[i];
  }
  return posed;
}

namespace {

double squared_gap(const Vec3& a, const Vec3& b) { return (a - b).squaredNorm(); }

// Closest pair between the half-line o + t d (t >= 0, |d| = 1) and segment
// a + s (b - a), s in [0, 1]. The problem is convex; the optimum is among
// the interior stationary point and the optima of the four boundary pieces.
std::pair<Vec3, Vec3> ray_segment_closest(const Vec3& o, const Vec3& d, const Vec3& a,
                                          const Vec3& b) {
  const Vec3 e = b - a;
  const Vec3 w = o - a;
  const double dd = d.dot(d);
  const double de = d.dot(e);
  const double ee = e.dot(e);
  const double dw = d.dot(w);
  const double ew = e.dot(w);

  Vec3 best_ray = o;
  Vec3 best_seg = a;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double t, double s) {
    const Vec3 pr = o + t * d;
    const Vec3 ps = a + s * e;
    const double g = squared_gap(pr, ps);
    if (g < best) {
      best = g;
      best_ray = pr;
      best_seg = ps;
    }
  };

  const double denom = dd * ee - de * de;
  if (denom > 1e-14 * dd * ee) {
    const double s = (dd * ew - de * dw) / denom;
    const double t = (de * s - dw) / dd;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0) consider(t, s);
  }
  consider(0.0, std::clamp(ew / ee, 0.0, 1.0));
  consider(std::max(0.0, -dw / dd), 0.0);
  consider(std::max(0.0, d.dot(b - o) / dd), 1.0);
  return {best_ray, best_seg};
}

void require_bone(const HandSkeleton& skeleton, int bone) {
  if (bone < 0 || bone >= static_cast<int>(skeleton.joint_count()) - 1) {
    throw std::invalid_argument("bone index out of range");
  }
}

}  // namespace

ClosestApproach ray_skeleton_closest(const Ray& ray, const HandSkeleton& skeleton) {
  const auto bones = skeleton.bones();
  if (bones.empty()) throw std::invalid_argument("skeleton has no bones");
  ClosestApproach best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < bones.size(); ++b) {
    const auto [on_ray, on_bone] = ray_segment_closest(
        ray.origin, ray.direction, skeleton.joints[bones[b].child], skeleton.joints[bones[b].parent]);
    const double dist = (on_ray - on_bone).norm();
    if (dist < best.distance) {
      best = {on_ray, on_bone, static_cast<int>(b), dist};
    }
  }
  return best;
}

std::vector<double> geodesic_distances(const HandSkeleton& skeleton, const Vec3& point, int bone) {
  require_bone(skeleton, bone);
  const auto bones = skeleton.bones();
  const Bone& seg = bones[bone];
  const Vec3& a = skeleton.joints[seg.child];
  const Vec3& b = skeleton.joints[seg.parent];
  const Vec3 e = b - a;
  const double s = std::clamp((point - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
  if ((a + s * e - point).norm() > 1e-6) {
    throw std::invalid_argument("point does not lie on the given bone");
  }

  const std::size_t n = skeleton.joint_count();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& bn : bones) {
    const double len = (skeleton.joints[bn.child] - skeleton.joints[bn.parent]).norm();
    adj[bn.child].push_back({bn.parent, len});
    adj[bn.parent].push_back({bn.child, len});
  }

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[seg.child] = (point - a).norm();
  dist[seg.parent] = (point - b).norm();
  queue.push({dist[seg.child], seg.child});
  queue.push({dist[seg.parent], seg.parent});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        queue.push({dist[v], v});
      }
    }
  }
  return dist;
}

std::vector<int> geodesic_knn(const HandSkeleton& skeleton, const Vec3& point, int bone, int k) {
  if (k <= 0) throw std::invalid_argument("K_3D must be >= 1");
  if (k > static_cast<int>(skeleton.joint_count())) {
    throw std::invalid_argument("K_3D exceeds the joint count");
  }
  const auto dist = geodesic_distances(skeleton, point, bone);
  std::vector<int> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return dist[i] < dist[j]; });
  order.resize(k);
  return order;
}

std::vector<double> local_intersection_feature(const Vec3& point, const HandSkeleton& skeleton,
                                               const std::vector<int>& joint_ids) {
  std::vector<bool> seen(skeleton.joint_count(), false);
  std::vector<double> out;
  out.reserve(3 * joint_ids.size());
  for (int j : joint_ids) {
    if (j < 0 || j >= static_cast<int>(skeleton.joint_count())) {
      throw std::invalid_argument("joint id out of range");
    }
    if (seen[j]) throw std::invalid_argument("joint ids must be distinct");
    seen[j] = true;
    const Vec3 local = skeleton.frames[j].transpose() * (point - skeleton.joints[j]);
    out.insert(out.end(), {local.x(), local.y(), local.z()});
  }
  return out;
}

std::vector<double> global_hand_embedding(const Ray& ray, const HandSkeleton& skeleton) {
  std::vector<double> out;
  out.reserve(6 * skeleton.joint_count());
  for (std::size_t j = 0; j < skeleton.joint_count(); ++j) {
    const Mat3 rt = skeleton.frames[j].transpose();
    const Vec3 o = rt * (ray.origin - skeleton.joints[j]);
    const Vec3 d = rt * ray.direction;
    out.insert(out.end(), {o.x(), o.y(), o.z(), d.x(), d.y(), d.z()});
  }
  return out;
}

std::vector<double> hand_local_feature(const Ray& ray, const HandSkeleton& skeleton, int k) {
  const ClosestApproach c = ray_skeleton_closest(ray, skeleton);
  const auto ids = geodesic_knn(skeleton, c.on_skeleton, c.bone, k);
  return local_intersection_feature(c.on_ray, skeleton, ids);
}

}  // namespace ddf
