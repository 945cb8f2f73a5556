#include <doctest.h>

#include <cmath>

#include "ddf/common/rng.hpp"
#include "ddf/geometry/bvh.hpp"
#include "ddf/geometry/intersect.hpp"

using namespace ddf;

namespace {

const Vec3 kA(0, 0, 0), kB(1, 0, 0), kC(0, 1, 0);

// Random ray aimed roughly at the unit cube so that most rays hit.
std::pair<Vec3, Vec3> random_ray(Rng& rng, double spread = 2.0) {
  Vec3 o(rng.uniform(-spread, spread), rng.uniform(-spread, spread), rng.uniform(-spread, spread));
  Vec3 target(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
  Vec3 d = target - o;
  if (d.norm() < 1e-6) d = Vec3::UnitX();
  return {o, d.normalized()};
}

void check_same(const std::optional<RayHit>& a, const std::optional<RayHit>& b) {
  REQUIRE(a.has_value() == b.has_value());
  if (a) {
    CHECK(std::abs(a->t - b->t) <= 1e-9);
    CHECK(a->face == b->face);
  }
}

}  // namespace

TEST_CASE("ray_triangle_intersect examples") {
  auto t = ray_triangle_intersect(Vec3(0.25, 0.25, 1), Vec3(0, 0, -1), kA, kB, kC);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(1.0));
  CHECK_FALSE(ray_triangle_intersect(Vec3(0.25, 0.25, 1), Vec3(0, 0, 1), kA, kB, kC));
  // Origin inside the triangle, direction in its plane: counts as t = 0.
  auto in_plane = ray_triangle_intersect(Vec3(0.25, 0.25, 0), Vec3(1, 0, 0), kA, kB, kC);
  REQUIRE(in_plane);
  CHECK(*in_plane == 0.0);
}

TEST_CASE("ray_triangle_intersect edge and vertex hits are inclusive") {
  CHECK(ray_triangle_intersect(Vec3(0.5, 0, 1), Vec3(0, 0, -1), kA, kB, kC));
  CHECK(ray_triangle_intersect(Vec3(0, 0, 1), Vec3(0, 0, -1), kA, kB, kC));
  CHECK(ray_triangle_intersect(Vec3(0.5, 0.5, 1), Vec3(0, 0, -1), kA, kB, kC));
  CHECK_FALSE(ray_triangle_intersect(Vec3(0.51, 0.51, 1), Vec3(0, 0, -1), kA, kB, kC));
}

TEST_CASE("in-plane ray from outside enters through an edge") {
  auto t = ray_triangle_intersect(Vec3(-1, 0.25, 0), Vec3(1, 0, 0), kA, kB, kC);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(1.0));
}

TEST_CASE("non-unit direction is rejected") {
  CHECK_THROWS_WITH_AS(ray_triangle_intersect(Vec3(0, 0, 1), Vec3(0, 0, -2), kA, kB, kC),
                       "direction not normalized", std::invalid_argument);
  const auto cube = make_cube();
  const auto bvh = Bvh::build(cube);
  CHECK_THROWS_AS(cast_ray(bvh, cube, Vec3(0, 0, 2), Vec3(0, 0, -1.1)), std::invalid_argument);
}

TEST_CASE("zero-area triangle never intersects") {
  CHECK_FALSE(ray_triangle_intersect(Vec3(0.5, 0, 1), Vec3(0, 0, -1), kA, kB, Vec3(2, 0, 0)));
}

TEST_CASE("build_bvh on an empty mesh fails") {
  CHECK_THROWS_WITH_AS(Bvh::build(TriangleMesh{}), "empty mesh", std::invalid_argument);
}

TEST_CASE("single triangle gives one leaf") {
  TriangleMesh m{{kA, kB, kC}, {{0, 1, 2}}};
  const auto bvh = Bvh::build(m);
  REQUIRE(bvh.nodes().size() == 1);
  CHECK(bvh.nodes()[0].is_leaf());
  CHECK(bvh.nodes()[0].count == 1);
  CHECK(bvh.face_order() == std::vector<std::uint32_t>{0});
}

TEST_CASE("cube casts") {
  const auto cube = make_cube();
  const auto bvh = Bvh::build(cube);
  auto hit = cast_ray(bvh, cube, Vec3(0, 0, 2), Vec3(0, 0, -1));
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(1.5));
  CHECK((hit->point - Vec3(0, 0, 0.5)).norm() < 1e-12);
  auto inside = cast_ray(bvh, cube, Vec3::Zero(), Vec3(1, 0, 0));
  REQUIRE(inside);
  CHECK(inside->t == doctest::Approx(0.5));
  check_same(hit, brute_force_cast(cube, Vec3(0, 0, 2), Vec3(0, 0, -1)));
  check_same(inside, brute_force_cast(cube, Vec3::Zero(), Vec3(1, 0, 0)));
}

TEST_CASE("cube: 500 random rays match brute force") {
  const auto cube = make_cube();
  const auto bvh = Bvh::build(cube);
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto [o, d] = random_ray(rng);
    check_same(cast_ray(bvh, cube, o, d), brute_force_cast(cube, o, d));
  }
}

TEST_CASE("ray through a shared cube edge resolves to the lowest face") {
  const auto cube = make_cube();
  const auto bvh = Bvh::build(cube);
  // Hits the diagonal shared by the two triangles of the +z face.
  const Vec3 o(0.1, 0.1, 2), d(0, 0, -1);
  const auto a = cast_ray(bvh, cube, o, d);
  const auto b = brute_force_cast(cube, o, d);
  check_same(a, b);
}

TEST_CASE("degenerate face inside a mesh is never reported") {
  auto cube = make_cube();
  const auto n = static_cast<std::uint32_t>(cube.vertices.size());
  // Collinear triangle lying across the path of the rays below.
  cube.vertices.insert(cube.vertices.end(), {Vec3(-1, 0, 0.7), Vec3(1, 0, 0.7), Vec3(0, 0, 0.7)});
  cube.faces.push_back({n, n + 1, n + 2});
  const auto degenerate = static_cast<std::uint32_t>(cube.faces.size() - 1);
  const auto bvh = Bvh::build(cube);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 o(rng.uniform(-1, 1), rng.uniform(-0.01, 0.01), 2);
    const auto hit = cast_ray(bvh, cube, o, Vec3(0, 0, -1));
    if (hit) CHECK(hit->face != degenerate);
  }
  // Exactly on the segment as well.
  const auto on = cast_ray(bvh, cube, Vec3(0.2, 0, 2), Vec3(0, 0, -1));
  REQUIRE(on);
  CHECK(on->face != degenerate);
  CHECK(on->t == doctest::Approx(1.5));
}

TEST_CASE("BVH structure invariants on an icosphere") {
  const auto mesh = make_icosphere(Vec3(0.1, -0.2, 0.3), 0.8, 3);
  const auto bvh = Bvh::build(mesh);
  const auto& nodes = bvh.nodes();
  std::vector<int> covered(mesh.face_count(), 0);
  std::vector<int> visits(nodes.size(), 0);
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    REQUIRE(id < nodes.size());
    ++visits[id];
    const auto& n = nodes[id];
    if (n.is_leaf()) {
      CHECK(n.count <= Bvh::kMaxLeafSize);
      for (std::uint32_t k = n.first; k < n.first + n.count; ++k) {
        const auto f = bvh.face_order()[k];
        ++covered[f];
        for (const auto& v : mesh.triangle(f)) {
          CHECK((v.array() >= n.box_min.array() - 1e-12).all());
          CHECK((v.array() <= n.box_max.array() + 1e-12).all());
        }
      }
    } else {
      stack.push_back(id + 1);
      stack.push_back(n.right);
      for (auto child : {id + 1, n.right}) {
        CHECK((nodes[child].box_min.array() >= n.box_min.array()).all());
        CHECK((nodes[child].box_max.array() <= n.box_max.array()).all());
      }
    }
  }
  for (int c : covered) CHECK(c == 1);
  for (int v : visits) CHECK(v == 1);
}

TEST_CASE("first-hit minimality and hit point on face") {
  const auto mesh = make_icosphere(Vec3::Zero(), 1.0, 2);
  const auto bvh = Bvh::build(mesh);
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto [o, d] = random_ray(rng, 1.5);
    const auto hit = cast_ray(bvh, mesh, o, d);
    if (!hit) continue;
    CHECK((hit->point - (o + hit->t * d)).norm() <= 1e-6);
    const auto tri = mesh.triangle(hit->face);
    CHECK(point_triangle_distance(hit->point, tri[0], tri[1], tri[2]) <= 1e-7);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
      const auto t = mesh.triangle(f);
      if (auto tf = ray_triangle_intersect(o, d, t[0], t[1], t[2])) CHECK(*tf >= hit->t - 1e-9);
    }
  }
}

TEST_CASE("analytic sphere examples") {
  auto a = analytic_sphere_ddf(Vec3::Zero(), 1.0, Vec3(0, 0, -2), Vec3(0, 0, 1));
  CHECK(a.visible);
  REQUIRE(a.depth);
  CHECK(*a.depth == doctest::Approx(1.0));
  CHECK_FALSE(analytic_sphere_ddf(Vec3::Zero(), 1.0, Vec3(0, 0, -2), Vec3(0, 0, -1)).visible);
  CHECK_FALSE(analytic_sphere_ddf(Vec3::Zero(), 1.0, Vec3(0, 2, 0), Vec3(0, 0, 1)).visible);
  CHECK_THROWS_AS(analytic_sphere_ddf(Vec3::Zero(), 0.0, Vec3(0, 0, -2), Vec3(0, 0, 1)),
                  std::invalid_argument);
  // Inside: exit distance.
  auto inside = analytic_sphere_ddf(Vec3::Zero(), 1.0, Vec3(0.5, 0, 0), Vec3(1, 0, 0));
  REQUIRE(inside.depth);
  CHECK(*inside.depth == doctest::Approx(0.5));
}

TEST_CASE("icosphere casting converges to the analytic sphere") {
  const auto mesh = make_icosphere(Vec3::Zero(), 1.0, 4);
  CHECK(mesh.face_count() == 5120);
  const MeshCaster caster(mesh);
  Rng rng(8);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 o(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const Vec3 d = rng.unit_vector();
    const auto hit = caster.cast(o, d);
    const auto truth = analytic_sphere_ddf(Vec3::Zero(), 1.0, o, d);
    if (hit && truth.depth) {
      CHECK(std::abs(hit->t - *truth.depth) <= 2e-2);
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("mesh validation names the violated invariant") {
  TriangleMesh bad{{kA, kB, kC}, {{0, 1, 3}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TriangleMesh repeated{{kA, kB, kC}, {{0, 1, 1}}};
  CHECK_THROWS_AS(repeated.validate(), std::invalid_argument);
  TriangleMesh nan{{kA, kB, Vec3(NAN, 0, 0)}, {{0, 1, 2}}};
  CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
}

TEST_CASE("closest point on triangle regions") {
  CHECK((closest_point_on_triangle(Vec3(-1, -1, 0), kA, kB, kC) - kA).norm() < 1e-15);
  CHECK((closest_point_on_triangle(Vec3(0.2, 0.2, 3), kA, kB, kC) - Vec3(0.2, 0.2, 0)).norm() < 1e-15);
  CHECK(point_triangle_distance(Vec3(0.5, -2, 0), kA, kB, kC) == doctest::Approx(2.0));
}
