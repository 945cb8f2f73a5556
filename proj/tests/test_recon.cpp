#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ddf/common/rng.hpp"
#include "ddf/geometry/intersect.hpp"
#include "ddf/recon/field.hpp"
#include "ddf/recon/kdtree.hpp"
#include "ddf/recon/mc_tables.hpp"
#include "ddf/recon/metrics.hpp"
#include "ddf/sampling/sampler.hpp"

using namespace ddf;
using detail::kMcTriangles;

namespace {

PointCloud random_cloud(Rng& rng, int n, double extent) {
  PointCloud c;
  for (int i = 0; i < n; ++i)
    c.points.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(-extent, extent));
  return c;
}

double exhaustive_nn(const std::vector<Vec3>& pts, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::min(best, (p - q).squaredNorm());
  return best;
}

double chamfer_oracle(const PointCloud& a, const PointCloud& b) {
  double sa = 0, sb = 0;
  for (const auto& p : a.points) sa += exhaustive_nn(b.points, p);
  for (const auto& p : b.points) sb += exhaustive_nn(a.points, p);
  const double s = a.mm_per_unit * a.mm_per_unit;
  return s * (sa / a.size() + sb / b.size());
}

double fscore_oracle(const PointCloud& a, const PointCloud& b, double tau) {
  const double t = tau / a.mm_per_unit;
  int pa = 0, pb = 0;
  for (const auto& p : a.points) pa += std::sqrt(exhaustive_nn(b.points, p)) <= t;
  for (const auto& p : b.points) pb += std::sqrt(exhaustive_nn(a.points, p)) <= t;
  const double precision = double(pa) / a.size();
  const double recall = double(pb) / b.size();
  return precision + recall == 0 ? 0.0 : 2 * precision * recall / (precision + recall);
}

class ConstantField : public FieldEvaluator {
 public:
  explicit ConstantField(FieldValue v) : v_(v) {}
  using FieldEvaluator::evaluate;
  FieldValue evaluate(const Ray&) const override { return v_; }

 private:
  FieldValue v_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("chamfer examples") {
  PointCloud a{{Vec3(0, 0, 0)}};
  PointCloud b{{Vec3(3, 4, 0)}};
  CHECK(chamfer_distance(a, b) == 50.0);
  CHECK(chamfer_distance(a, a) == 0.0);
  CHECK_THROWS_AS(chamfer_distance(a, PointCloud{}), std::invalid_argument);
  PointCloud scaled = b;
  scaled.mm_per_unit = 2.0;
  CHECK_THROWS_AS(chamfer_distance(a, scaled), std::invalid_argument);
  PointCloud a2 = a;
  a2.mm_per_unit = 2.0;
  CHECK(chamfer_distance(a2, scaled) == 200.0);
}

TEST_CASE("f-score examples") {
  PointCloud a{{Vec3(0, 0, 0)}};
  PointCloud b{{Vec3(6, 0, 0)}};
  CHECK(f_score(a, b, 5) == 0.0);
  CHECK(f_score(a, b, 10) == 1.0);
  CHECK(f_score(a, b, 6) == 1.0);  // inclusive threshold
  CHECK(f_score(a, a, 1e-9) == 1.0);
  CHECK_THROWS_AS(f_score(a, PointCloud{}, 5), std::invalid_argument);
  CHECK_THROWS_AS(f_score(a, b, 0), std::invalid_argument);
  const auto r = evaluate_clouds(a, b);
  CHECK(r.f5 == 0.0);
  CHECK(r.f10 == 1.0);
  CHECK(r.cd == 72.0);
  CHECK(r.predicted_points == 1);
}

TEST_CASE("k-d tree equals exhaustive search on 50 random instances") {
  Rng rng(1);
  for (int inst = 0; inst < 50; ++inst) {
    auto cloud = random_cloud(rng, 200, 1.0);
    // Duplicates and grid points exercise the tie-break.
    cloud.points[10] = cloud.points[3];
    cloud.points.push_back(Vec3(0.5, 0.5, 0.5));
    cloud.points.push_back(Vec3(-0.5, 0.5, 0.5));
    const KdTree tree(cloud.points);
    for (int q = 0; q < 200; ++q) {
      const Vec3 query = q == 0 ? Vec3(0, 0.5, 0.5) : Vec3(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
      const auto a = tree.nearest(query);
      const auto b = nearest_exhaustive(cloud.points, query);
      CHECK(a.index == b.index);
      CHECK(a.squared_distance == b.squared_distance);
    }
    CHECK(tree.nearest(cloud.points[10]).index == 3);
  }
  CHECK_THROWS_AS(KdTree({}), std::invalid_argument);
}

TEST_CASE("metrics match exhaustive oracles on 50 random instances") {
  Rng rng(2);
  for (int inst = 0; inst < 50; ++inst) {
    auto a = random_cloud(rng, 200, 50.0);
    auto b = random_cloud(rng, 200, 50.0);
    CHECK(std::abs(chamfer_distance(a, b) - chamfer_oracle(a, b)) <= 1e-9 * chamfer_oracle(a, b));
    for (double tau : {5.0, 10.0}) CHECK(std::abs(f_score(a, b, tau) - fscore_oracle(a, b, tau)) <= 1e-9);
    CHECK(chamfer_distance(a, a) == 0.0);
    CHECK(f_score(a, a, 5.0) == 1.0);
    CHECK(chamfer_distance(a, b) == doctest::Approx(chamfer_distance(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("chamfer is invariant under a common rigid transform") {
  Rng rng(3);
  for (int inst = 0; inst < 20; ++inst) {
    auto a = random_cloud(rng, 150, 1.0);
    auto b = random_cloud(rng, 180, 1.0);
    a.mm_per_unit = b.mm_per_unit = 100.0;
    const auto t = RigidTransform::from_axis_angle(rng.unit_vector() * 2.0, Vec3(0.3, -2, 5));
    PointCloud ta = a, tb = b;
    for (auto& p : ta.points) p = t.apply_point(p);
    for (auto& p : tb.points) p = t.apply_point(p);
    const double c0 = chamfer_distance(a, b);
    CHECK(std::abs(chamfer_distance(ta, tb) - c0) <= 1e-6 * c0);
  }
}

TEST_CASE("point cloud validation") {
  PointCloud c{{Vec3(NAN, 0, 0)}};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  PointCloud d{{Vec3::Zero()}, 0.0};
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("ddf_to_pointcloud on the analytic sphere") {
  const AnalyticSphereField sphere(Vec3::Zero(), 1.0);
  const auto rays = sample_rays_uniform(BoundingVolume{}, 10000, 4);
  const auto cloud = ddf_to_pointcloud(sphere, rays);
  CHECK(cloud.size() > 5000);
  for (const auto& q : cloud.points) CHECK(std::abs(q.norm() - 1.0) <= 1e-6);
  // Order follows the input rays.
  std::size_t k = 0;
  for (const auto& r : rays) {
    const auto s = analytic_sphere_ddf(Vec3::Zero(), 1.0, r.origin, r.direction);
    if (!s.depth) continue;
    CHECK(cloud.points[k++] == r.at(*s.depth));
  }
  CHECK(k == cloud.size());
}

TEST_CASE("ddf_to_pointcloud edge cases") {
  const ConstantField none({0.0, 1.0});
  const auto rays = sample_rays_uniform(BoundingVolume{}, 100, 5);
  CHECK(ddf_to_pointcloud(none, rays).empty());
  const ConstantField maybe({0.6, 0.0});
  CHECK(ddf_to_pointcloud(maybe, rays, 0.5).size() == 100);
  CHECK(ddf_to_pointcloud(maybe, rays, 0.7).empty());
  CHECK_THROWS_AS(ddf_to_pointcloud(maybe, rays, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ddf_to_pointcloud(maybe, rays, 1.0), std::invalid_argument);
}

TEST_CASE("mesh ground-truth cloud lies on the mesh") {
  const auto mesh = make_icosphere(Vec3(0.1, 0, -0.1), 0.6, 2);
  const MeshField field(mesh);
  const auto rays = sample_rays_uniform(BoundingVolume{}, 2000, 6);
  const auto cloud = ddf_to_pointcloud(field, rays);
  CHECK(cloud.size() > 300);
  for (const auto& q : cloud.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : mesh.faces)
      best = std::min(best, (closest_point_on_triangle(q, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]) - q).norm());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("fibonacci directions are unit and spread out") {
  const auto d = fibonacci_directions(64);
  REQUIRE(d.size() == 64);
  Vec3 sum = Vec3::Zero();
  for (const auto& v : d) {
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    sum += v;
  }
  CHECK(sum.norm() / 64 < 0.05);
}

TEST_CASE("marching cubes table sanity") {
  CHECK(kMcTriangles[0][0] == -1);
  CHECK(kMcTriangles[255][0] == -1);
  for (int c = 1; c < 255; ++c) {
    int n = 0;
    while (n < 16 && kMcTriangles[c][n] != -1) ++n;
    CHECK(n % 3 == 0);
    CHECK(n >= 3);
    // Complementary configurations cut the same edges.
    std::vector<bool> edges(12, false), comp(12, false);
    for (int i = 0; i < n; ++i) edges[kMcTriangles[c][i]] = true;
    for (int i = 0; kMcTriangles[255 - c][i] != -1; ++i) comp[kMcTriangles[255 - c][i]] = true;
    CHECK(edges == comp);
  }
}

TEST_CASE("marching cubes on a sampled sphere is closed") {
  const int n = 20;
  std::vector<double> values(n * n * n);
  const Vec3 lo(-1, -1, -1), hi(1, 1, 1);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const Vec3 p = lo + (hi - lo).cwiseProduct(Vec3(x, y, z) / (n - 1));
        values[(z * n + y) * n + x] = p.norm();
      }
  const auto mesh = marching_cubes(values, n, lo, hi, 0.7);
  REQUIRE(mesh.faces.size() > 100);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  double volume = 0;
  for (const auto& f : mesh.faces) {
    for (int j = 0; j < 3; ++j) {
      const auto a = f[j], b = f[(j + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
    volume += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]])) / 6;
  }
  for (const auto& [e, count] : edges) CHECK(count == 2);
  CHECK(std::abs(volume) == doctest::Approx(4.0 / 3.0 * 3.14159265 * 0.343).epsilon(0.05));
  for (const auto& v : mesh.vertices) CHECK(std::abs(v.norm() - 0.7) < 0.02);
  const auto empty = marching_cubes(values, n, lo, hi, 10.0);
  CHECK(empty.faces.empty());
}

TEST_CASE("ddf_to_mesh on the analytic sphere") {
  const AnalyticSphereField sphere(Vec3::Zero(), 1.0);
  const BoundingVolume box;
  MeshExtractionOptions opts;
  const auto mesh = ddf_to_mesh(sphere, box, opts);
  REQUIRE(!mesh.faces.empty());
  std::vector<double> err;
  for (const auto& v : mesh.vertices) err.push_back(std::abs(v.norm() - 1.0));
  std::sort(err.begin(), err.end());
  CHECK(err[err.size() * 95 / 100] <= 0.05);
}

TEST_CASE("doubling directions does not increase the median iso-shell error") {
  const AnalyticSphereField sphere(Vec3::Zero(), 1.0);
  const BoundingVolume box;
  const double iso = 0.005 * (box.max - box.min).norm();
  double prev = std::numeric_limits<double>::infinity();
  for (int dirs : {16, 32, 64}) {
    MeshExtractionOptions opts;
    opts.grid_resolution = 32;
    opts.directions_per_point = dirs;
    const auto mesh = ddf_to_mesh(sphere, box, opts);
    std::vector<double> err;
    for (const auto& v : mesh.vertices) err.push_back(std::abs(std::abs(v.norm() - 1.0) - iso));
    const double m = median(err);
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("ddf_to_mesh errors and empty results") {
  const BoundingVolume box;
  const ConstantField none({0.0, 0.0});
  CHECK_THROWS_WITH_AS(ddf_to_mesh(none, box), "empty field", std::runtime_error);
  MeshExtractionOptions opts;
  opts.grid_resolution = 8;
  opts.directions_per_point = 6;
  opts.iso = 100.0;
  CHECK(ddf_to_mesh(AnalyticSphereField(Vec3::Zero(), 1.0), box, opts).faces.empty());
  opts.grid_resolution = 7;
  CHECK_THROWS_AS(ddf_to_mesh(none, box, opts), std::invalid_argument);
  opts.grid_resolution = 8;
  opts.directions_per_point = 5;
  CHECK_THROWS_AS(ddf_to_mesh(none, box, opts), std::invalid_argument);
}
