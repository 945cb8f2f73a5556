#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "ddf/common/rng.hpp"
#include "ddf/hand/hand_features.hpp"

using namespace ddf;

namespace {

HandSkeleton chain() {
  return make_skeleton({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)}, {-1, 0, 1, 2});
}

HandPose random_pose(Rng& rng, double scale = 1.0) {
  HandPose p = HandPose::zero();
  for (auto& v : p.theta) v = rng.uniform(-scale, scale);
  return p;
}

RigidTransform random_rigid(Rng& rng) {
  const Vec3 axis = rng.unit_vector() * rng.uniform(0.1, 3.0);
  return RigidTransform::from_axis_angle(axis, Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
}

HandSkeleton moved(const HandSkeleton& s, const RigidTransform& t) {
  HandSkeleton out = s;
  for (std::size_t j = 0; j < s.joint_count(); ++j) {
    out.joints[j] = t.apply_point(s.joints[j]);
    out.frames[j] = t.rotation * s.frames[j];
  }
  return out;
}

Ray moved(const Ray& r, const RigidTransform& t) {
  return {t.apply_point(r.origin), t.rotation * r.direction};
}

Vec3 closest_on_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double s = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return a + s * ab;
}

// Dijkstra over the bone graph with P_D inserted as an extra node.
std::vector<double> dijkstra_oracle(const HandSkeleton& s, const Vec3& p, int bone) {
  const auto bones = s.bones();
  const int n = static_cast<int>(s.joint_count());
  std::vector<std::vector<std::pair<int, double>>> adj(n + 1);
  for (const auto& b : bones) {
    const double w = (s.joints[b.child] - s.joints[b.parent]).norm();
    adj[b.child].push_back({b.parent, w});
    adj[b.parent].push_back({b.child, w});
  }
  const auto& b = bones[bone];
  for (int end : {b.child, b.parent}) {
    const double w = (s.joints[end] - p).norm();
    adj[n].push_back({end, w});
    adj[end].push_back({n, w});
  }
  std::vector<double> dist(n + 1, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[n] = 0;
  q.push({0, n});
  while (!q.empty()) {
    const auto [d, u] = q.top();
    q.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        q.push({dist[v], v});
      }
  }
  dist.pop_back();
  return dist;
}

}  // namespace

TEST_CASE("bundled skeleton is valid") {
  const auto s = default_rest_skeleton();
  CHECK(s.joint_count() == 21);
  CHECK(s.bones().size() == 20);
  CHECK(s.articulated_joints().size() == 15);
  CHECK(s.root() == 0);
  CHECK(s.joints[0] == Vec3::Zero());
  CHECK_NOTHROW(s.validate());
  for (const auto& f : s.frames) {
    CHECK((f.transpose() * f - Mat3::Identity()).norm() <= 1e-7);
    CHECK(f.determinant() == doctest::Approx(1.0));
  }
}

TEST_CASE("skeleton text round-trips") {
  const auto s = default_rest_skeleton();
  const auto t = parse_skeleton(format_skeleton(s));
  REQUIRE(t.joint_count() == s.joint_count());
  for (std::size_t j = 0; j < s.joint_count(); ++j) {
    CHECK((t.joints[j] - s.joints[j]).norm() <= 1e-12);
    CHECK(t.parent[j] == s.parent[j]);
  }
}

TEST_CASE("skeleton parser errors") {
  CHECK_THROWS_AS(parse_skeleton("ddf-skeleton 2\njoints 1\n0 -1 0 0 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_skeleton("ddf-skeleton 1\njoints 2\n0 -1 0 0 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_skeleton("ddf-skeleton 1\njoints 2\n0 -1 0 0 0\n1 0 0 0 0\n"),
                  std::invalid_argument);  // zero-length bone
  CHECK_THROWS_AS(parse_skeleton("ddf-skeleton 1\njoints 2\n0 -1 0 0 0\n1 1 1 0 0\n"),
                  std::invalid_argument);  // cycle
}

TEST_CASE("forward kinematics: zero pose is the rest skeleton") {
  const auto rest = default_rest_skeleton();
  const auto posed = forward_kinematics(rest, HandPose::zero());
  for (std::size_t j = 0; j < rest.joint_count(); ++j) {
    CHECK((posed.joints[j] - rest.joints[j]).norm() <= 1e-15);
    CHECK((posed.frames[j] - rest.frames[j]).norm() <= 1e-15);
  }
  CHECK_THROWS_AS(forward_kinematics(rest, HandPose{std::vector<double>(44, 0.0)}),
                  std::invalid_argument);
}

TEST_CASE("forward kinematics: flexing one joint moves only its subtree, rigidly") {
  const auto rest = default_rest_skeleton();
  const auto art = rest.articulated_joints();
  const int k = 0;
  const int joint = art[k];
  HandPose pose = HandPose::zero();
  pose.theta[3 * k + 2] = std::numbers::pi / 2;  // about the frame z axis
  const auto posed = forward_kinematics(rest, pose);
  std::vector<bool> in_subtree(rest.joint_count(), false);
  in_subtree[joint] = true;
  for (std::size_t j = 0; j < rest.joint_count(); ++j)
    if (rest.parent[j] >= 0 && in_subtree[rest.parent[j]]) in_subtree[j] = true;
  const Mat3 r = rest.frames[joint] * Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix() *
                 rest.frames[joint].transpose();
  int moved_count = 0;
  for (std::size_t j = 0; j < rest.joint_count(); ++j) {
    if (!in_subtree[j]) {
      CHECK((posed.joints[j] - rest.joints[j]).norm() <= 1e-15);
      continue;
    }
    const Vec3 expect = rest.joints[joint] + r * (rest.joints[j] - rest.joints[joint]);
    CHECK((posed.joints[j] - expect).norm() <= 1e-12);
    moved_count += (posed.joints[j] - rest.joints[j]).norm() > 1e-6;
  }
  CHECK(moved_count >= 2);
}

TEST_CASE("forward kinematics preserves bone lengths for 100 random poses") {
  const auto rest = default_rest_skeleton();
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    const auto posed = forward_kinematics(rest, random_pose(rng, 2.0));
    CHECK(posed.joints[0] == Vec3::Zero());
    for (const auto& b : rest.bones()) {
      const double l0 = (rest.joints[b.child] - rest.joints[b.parent]).norm();
      const double l1 = (posed.joints[b.child] - posed.joints[b.parent]).norm();
      CHECK(std::abs(l1 - l0) / l0 <= 1e-7);
    }
    CHECK_NOTHROW(posed.validate());
  }
}

TEST_CASE("canonical pose wraps axis-angles") {
  HandPose p = HandPose::zero();
  p.theta[0] = 1.5 * std::numbers::pi;
  const auto c = p.canonical();
  CHECK(c.joint(0).norm() <= std::numbers::pi + 1e-12);
  const auto rest = default_rest_skeleton();
  const auto a = forward_kinematics(rest, p);
  const auto b = forward_kinematics(rest, c);
  for (std::size_t j = 0; j < rest.joint_count(); ++j) CHECK((a.joints[j] - b.joints[j]).norm() <= 1e-12);
}

TEST_CASE("ray_skeleton_closest examples") {
  const auto s = make_skeleton({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {-1, 0});
  const auto c = ray_skeleton_closest(Ray{Vec3(0.5, 1, 0), Vec3(0, 0, 1)}, s);
  CHECK((c.on_ray - Vec3(0.5, 1, 0)).norm() < 1e-12);
  CHECK((c.on_skeleton - Vec3(0.5, 0, 0)).norm() < 1e-12);
  CHECK(c.distance == doctest::Approx(1.0));
  const auto hit = ray_skeleton_closest(Ray{Vec3(0.3, 0, -1), Vec3(0, 0, 1)}, s);
  CHECK(hit.distance <= 1e-12);
  CHECK((hit.on_ray - hit.on_skeleton).norm() <= 1e-12);
}

TEST_CASE("ray_skeleton_closest ties go to the lowest bone") {
  const auto s = chain();
  // Perpendicular ray over joint 1, equidistant from bones 0 and 1.
  const auto c = ray_skeleton_closest(Ray{Vec3(1, 0, 1), Vec3(0, 1, 0)}, s);
  CHECK(c.bone == 0);
  CHECK(c.distance == doctest::Approx(1.0));
}

TEST_CASE("ray_skeleton_closest matches a dense-sampling oracle") {
  const auto s = forward_kinematics(default_rest_skeleton(), [] {
    Rng rng(5);
    return random_pose(rng, 0.5);
  }());
  const auto bones = s.bones();
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const Ray ray{Vec3(rng.uniform(-0.1, 0.25), rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)),
                  rng.unit_vector()};
    const auto c = ray_skeleton_closest(ray, s);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10000; ++k) {
      const Vec3 p = ray.at(0.6 * k / 10000.0);
      for (const auto& b : bones)
        best = std::min(best, (closest_on_segment(s.joints[b.parent], s.joints[b.child], p) - p).norm());
    }
    CHECK(c.distance <= best + 1e-9);
    CHECK(std::abs(c.distance - best) <= 1e-3);
    CHECK(std::abs((c.on_ray - c.on_skeleton).norm() - c.distance) <= 1e-12);
  }
}

TEST_CASE("geodesic_knn chain examples") {
  const auto s = chain();
  const Vec3 mid(1.5, 0, 0);
  CHECK(geodesic_knn(s, mid, 1, 2) == std::vector<int>{1, 2});
  CHECK(geodesic_knn(s, mid, 1, 4) == std::vector<int>{1, 2, 0, 3});
  const auto d = geodesic_distances(s, mid, 1);
  CHECK(d == std::vector<double>{1.5, 0.5, 0.5, 1.5});
  CHECK_THROWS_AS(geodesic_knn(s, mid, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(geodesic_knn(s, mid, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(geodesic_knn(s, Vec3(1.5, 0.1, 0), 1, 2), std::invalid_argument);
}

TEST_CASE("geodesic_knn matches a Dijkstra oracle on the full skeleton") {
  Rng rng(8);
  const auto s = forward_kinematics(default_rest_skeleton(), random_pose(rng, 0.6));
  const auto bones = s.bones();
  for (int i = 0; i < 200; ++i) {
    const int bone = static_cast<int>(rng.below(bones.size()));
    const double f = rng.uniform(0, 1);
    const Vec3 p = s.joints[bones[bone].parent] + f * (s.joints[bones[bone].child] - s.joints[bones[bone].parent]);
    const auto oracle = dijkstra_oracle(s, p, bone);
    const auto got = geodesic_distances(s, p, bone);
    for (std::size_t j = 0; j < oracle.size(); ++j) CHECK(std::abs(got[j] - oracle[j]) <= 1e-12);
    std::vector<int> order(oracle.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return got[a] < got[b]; });
    order.resize(8);
    const auto knn = geodesic_knn(s, p, bone, 8);
    CHECK(knn == order);
    for (std::size_t j = 1; j < knn.size(); ++j) CHECK(got[knn[j - 1]] <= got[knn[j]]);
  }
}

TEST_CASE("local_intersection_feature examples") {
  const auto s = make_skeleton({Vec3(0, 0, 0), Vec3(1, 0, 0)}, {-1, 0});
  CHECK(s.frames[0] == Mat3::Identity());
  const Vec3 p(0.2, 0.3, -0.4);
  const auto f = local_intersection_feature(p, s, {0, 1});
  REQUIRE(f.size() == 6);
  CHECK(f[0] == 0.2);
  CHECK(f[1] == 0.3);
  CHECK(f[2] == -0.4);
  const auto at_joint = local_intersection_feature(s.joints[1], s, {1});
  for (double v : at_joint) CHECK(std::abs(v) <= 1e-15);
  CHECK_THROWS_AS(local_intersection_feature(p, s, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(local_intersection_feature(p, s, {2}), std::invalid_argument);
}

TEST_CASE("global_hand_embedding examples") {
  HandSkeleton s = default_rest_skeleton();
  for (auto& f : s.frames) f = Mat3::Identity();
  for (auto& j : s.joints) j = Vec3::Zero();
  const Ray r{Vec3(0.1, 0.2, 0.3), Vec3(0, 0.6, 0.8)};
  const auto g = global_hand_embedding(r, s);
  REQUIRE(g.size() == 126);
  for (int j = 0; j < 21; ++j) {
    CHECK(g[6 * j + 0] == 0.1);
    CHECK(g[6 * j + 4] == 0.6);
  }
  Rng rng(2);
  const auto posed = forward_kinematics(default_rest_skeleton(), random_pose(rng));
  const auto e = global_hand_embedding(Ray{Vec3(0.1, 0, 0), rng.unit_vector()}, posed);
  for (int j = 0; j < 21; ++j)
    CHECK(std::abs(Vec3(e[6 * j + 3], e[6 * j + 4], e[6 * j + 5]).norm() - 1.0) <= 1e-6);
}

TEST_CASE("embeddings are invariant under a common rigid transform") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto s = forward_kinematics(default_rest_skeleton(), random_pose(rng, 0.7));
    const Ray ray{Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)), rng.unit_vector()};
    const auto t = random_rigid(rng);
    const auto s2 = moved(s, t);
    const Ray r2 = moved(ray, t);
    const auto g1 = global_hand_embedding(ray, s);
    const auto g2 = global_hand_embedding(r2, s2);
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(std::abs(g1[k] - g2[k]) <= 1e-7);
    const auto l1 = hand_local_feature(ray, s, 8);
    const auto l2 = hand_local_feature(r2, s2, 8);
    REQUIRE(l1.size() == 24);
    REQUIRE(l2.size() == 24);
    for (std::size_t k = 0; k < l1.size(); ++k) CHECK(std::abs(l1[k] - l2[k]) <= 1e-7);
    const auto c = ray_skeleton_closest(ray, s);
    const auto ids = geodesic_knn(s, c.on_skeleton, c.bone, 8);
    const auto a = local_intersection_feature(c.on_ray, s, ids);
    const auto b = local_intersection_feature(t.apply_point(c.on_ray), s2, ids);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-7);
  }
}

TEST_CASE("feature lengths are fixed") {
  const auto s = default_rest_skeleton();
  Rng rng(1);
  for (int k : {1, 4, 8, 21}) {
    const auto f = hand_local_feature(Ray{Vec3(0.05, 0.02, 0.1), rng.unit_vector()}, s, k);
    CHECK(f.size() == static_cast<std::size_t>(3 * k));
  }
}
