#include <doctest.h>

#include <cmath>

#include "ddf/common/rng.hpp"
#include "ddf/geometry/mesh.hpp"
#include "ddf/projection/camera.hpp"
#include "ddf/projection/pyramid.hpp"

using namespace ddf;

namespace {

CameraPose unit_camera() {
  CameraPose c;
  c.fx = c.fy = 1.0;
  c.cx = c.cy = 0.0;
  return c;
}

FeaturePyramid constant_pyramid(double value, int h = 16, int w = 16, int levels = 3) {
  FeaturePyramid p;
  for (int l = 0; l < levels; ++l) {
    const auto [lh, lw] = level_size(h, w, l);
    FeatureGrid g(lh, lw, 2);
    std::fill(g.data.begin(), g.data.end(), value);
    p.levels.push_back(g);
  }
  return p;
}

}  // namespace

TEST_CASE("project_point examples") {
  const auto c = unit_camera();
  const Vec2 p = project_point(c, Vec3(0.2, 0.4, 2));
  CHECK(p.x() == doctest::Approx(0.1));
  CHECK(p.y() == doctest::Approx(0.2));
  CameraPose k = unit_camera();
  k.fx = 500;
  k.fy = 400;
  k.cx = 320;
  k.cy = 240;
  CHECK(project_point(k, Vec3(0, 0, 1)) == Vec2(320, 240));
  CHECK_THROWS_WITH_AS(project_point(c, Vec3(1, 1, 0)), "behind camera", std::domain_error);
}

TEST_CASE("project_ray examples") {
  const auto c = unit_camera();
  const auto lateral = project_ray(c, Ray{Vec3(0, 0, 2), Vec3(1, 0, 0)});
  REQUIRE_FALSE(lateral.degenerate());
  CHECK(lateral.p == Vec2(0, 0));
  CHECK((*lateral.direction - Vec2(1, 0)).norm() < 1e-12);
  CHECK(project_ray(c, Ray{Vec3(0, 0, 2), Vec3(0, 0, -1)}).degenerate());
  CHECK(project_ray(c, Ray{Vec3(0, 0, 2), Vec3(0, 0, 1)}).degenerate());
  // Scale-free: a larger offset does not change the flag.
  CHECK(project_ray(c, Ray{Vec3(0, 0, 2), Vec3(0, 0, -1)}, 1.0).degenerate());
}

TEST_CASE("projected samples are collinear with the 2D ray") {
  CameraPose c = unit_camera();
  c.fx = c.fy = 64;
  c.cx = c.cy = 32;
  c.rotation = Vec3(1, -1, -1).asDiagonal();
  c.translation = Vec3(0, 0, 3);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Ray r{Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.unit_vector()};
    const auto r2 = project_ray(c, r);
    if (r2.degenerate()) continue;
    for (double s : {0.05, 0.1, 0.2}) {
      const Vec2 q = project_point(c, r.at(s)) - r2.p;
      const Vec2 d = *r2.direction;
      CHECK(std::abs(q.x() * d.y() - q.y() * d.x()) <= 1e-5);
    }
  }
}

TEST_CASE("sample_2d_points examples") {
  Ray2D r{Vec2(0, 0), Vec2(1, 0)};
  const auto pts = sample_2d_points(r, 8, 2.0);
  REQUIRE(pts.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(pts[i] == Vec2(2.0 * (i + 1), 0));
  const auto one = sample_2d_points(r, 1, 3.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Vec2(3, 0));
  for (const auto& p : sample_2d_points(r, 4, 0.0)) CHECK(p == r.p);
  CHECK_THROWS_WITH_AS(sample_2d_points(Ray2D{Vec2(1, 1), std::nullopt}, 8, 2.0),
                       "degenerate ray has no 2D direction", std::invalid_argument);
}

TEST_CASE("bilinear_sample examples") {
  FeaturePyramid p;
  FeatureGrid g(2, 2, 1);
  g.at(0, 0, 0) = 0;
  g.at(0, 1, 0) = 1;
  g.at(1, 0, 0) = 2;
  g.at(1, 1, 0) = 3;
  p.levels.push_back(g);
  CHECK(bilinear_sample(p, Vec2(0.5, 0.5))[0] == doctest::Approx(1.5));
  CHECK(bilinear_sample(p, Vec2(1, 0))[0] == 1.0);
  CHECK(bilinear_sample(p, Vec2(0, 1))[0] == 2.0);
  // Clamped outside the image.
  CHECK(bilinear_sample(p, Vec2(-5, -5))[0] == 0.0);
  CHECK(bilinear_sample(p, Vec2(9, 0.5))[0] == doctest::Approx(2.0));
  for (double v : bilinear_sample(constant_pyramid(0.7), Vec2(3.3, 9.1))) CHECK(v == doctest::Approx(0.7));
  CHECK_THROWS_AS(bilinear_sample(FeaturePyramid{}, Vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("bilinear interpolation is exact on affine channels") {
  FeatureGrid g(9, 11, 1);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 11; ++x) g.at(y, x, 0) = 0.3 * x - 1.7 * y + 0.25;
  FeaturePyramid p{{g}};
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Vec2 q(rng.uniform(0, 10), rng.uniform(0, 8));
    CHECK(std::abs(bilinear_sample(p, q)[0] - (0.3 * q.x() - 1.7 * q.y() + 0.25)) <= 1e-6);
  }
}

TEST_CASE("level sizes halve rounding up") {
  CHECK(level_size(64, 64, 0) == std::pair{64, 64});
  CHECK(level_size(64, 64, 4) == std::pair{4, 4});
  CHECK(level_size(5, 7, 1) == std::pair{3, 4});
  CHECK(level_size(5, 7, 3) == std::pair{1, 1});
}

TEST_CASE("pyramid validation") {
  auto p = constant_pyramid(1.0);
  CHECK_NOTHROW(p.validate());
  CHECK(p.total_channels() == 6);
  p.levels[1].data[0] = NAN;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  auto q = constant_pyramid(1.0);
  q.levels[2] = FeatureGrid(3, 3, 2);
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("collect_ray_feature_inputs") {
  CameraPose c = unit_camera();
  c.fx = c.fy = 8;
  c.cx = c.cy = 8;
  const auto p = constant_pyramid(0.5);
  const auto degenerate = collect_ray_feature_inputs(p, c, Ray{Vec3(0, 0, 2), Vec3(0, 0, -1)}, 8, 4.0);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.along_ray.empty());
  CHECK(degenerate.query.size() == 6);
  const auto normal = collect_ray_feature_inputs(p, c, Ray{Vec3(0, 0, 2), Vec3(1, 0, 0)}, 8, 1.0);
  CHECK_FALSE(normal.degenerate);
  REQUIRE(normal.along_ray.size() == 8);
  for (const auto& f : normal.along_ray) CHECK(f == normal.query);
}

TEST_CASE("synthetic pyramid: coordinate channel is monotone along the ray") {
  CameraPose c;
  c.fx = c.fy = 64;
  c.cx = c.cy = 32;
  c.rotation = Vec3(1, -1, -1).asDiagonal();
  c.translation = Vec3(0, 0, 3);
  SyntheticPyramidOptions opts;
  const auto mesh = make_icosphere(Vec3::Zero(), 0.5, 2);
  const auto p = make_synthetic_pyramid(mesh, c, opts);
  CHECK(p.levels.size() == 5);
  CHECK(p.total_channels() == 5 * kSyntheticChannelsPerLevel);
  // World +x maps to image +x, so theta* = (1, 0) for this ray.
  const auto in = collect_ray_feature_inputs(p, c, Ray{Vec3(-0.4, 0.1, 0), Vec3(1, 0, 0)}, 8, 2.0);
  REQUIRE_FALSE(in.degenerate);
  double prev = in.query[0];
  for (const auto& f : in.along_ray) {
    CHECK(f[0] > prev);
    prev = f[0];
  }
  // Silhouette channel: centre pixel sees the sphere, a corner does not.
  CHECK(p.levels[0].at(32, 32, 3) == 1.0);
  CHECK(p.levels[0].at(0, 0, 3) == 0.0);
  // Deterministic per seed.
  const auto again = make_synthetic_pyramid(mesh, c, opts);
  CHECK(again.levels[2].data == p.levels[2].data);
}
