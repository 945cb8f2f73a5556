#include "ddf/geometry/intersect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddf {
namespace {

// Relative tolerances. Area test is relative to the squared edge scale,
// plane tests are relative to the unit normal.
constexpr double kDegenerateArea = 1e-14;
constexpr double kParallel = 1e-12;
constexpr double kOnPlane = 1e-12;
// Hits with t in [-kBehind, 0) come from rounding on an origin lying on the
// surface and are reported as t = 0.
constexpr double kBehind = 1e-12;

// In-plane ray against the triangle: intersect t in [0, inf) with the three
// edge half-planes and return the entry parameter.
std::optional<double> coplanar_clip(const Vec3& origin, const Vec3& direction, const Vec3& v0,
                                    const Vec3& v1, const Vec3& v2, const Vec3& normal) {
  const std::array<const Vec3*, 3> corners{&v0, &v1, &v2};
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 3; ++e) {
    const Vec3& a = *corners[e];
    const Vec3& b = *corners[(e + 1) % 3];
    Vec3 inward = normal.cross(b - a);
    const double len = inward.norm();
    if (len == 0.0) return std::nullopt;
    inward /= len;
    const double g0 = inward.dot(origin - a);
    const double g1 = inward.dot(direction);
    if (std::abs(g1) <= kParallel) {
      if (g0 < -kOnPlane) return std::nullopt;
      continue;
    }
    const double t_edge = -g0 / g1;
    if (g1 > 0.0) {
      t_lo = std::max(t_lo, t_edge);
    } else {
      t_hi = std::min(t_hi, t_edge);
    }
  }
  if (t_lo > t_hi) return std::nullopt;
  return t_lo;
}

}  // namespace

void require_unit_direction(const Vec3& direction) {
  if (!(std::abs(direction.norm() - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument("direction not normalized");
  }
}

std::optional<double> ray_triangle_intersect_unchecked(const Vec3& origin, const Vec3& direction,
                                                       const Vec3& v0, const Vec3& v1,
                                                       const Vec3& v2) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 n = e1.cross(e2);
  const double n_len = n.norm();
  const double scale = e1.squaredNorm() + e2.squaredNorm();
  if (!(n_len > kDegenerateArea * scale)) return std::nullopt;

  // Moller-Trumbore with edge-inclusive barycentric bounds.
  const Vec3 pvec = direction.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) <= kParallel * n_len) {
    const Vec3 unit_n = n / n_len;
    if (std::abs(unit_n.dot(origin - v0)) > kOnPlane) return std::nullopt;
    return coplanar_clip(origin, direction, v0, v1, v2, unit_n);
  }
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - v0;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = direction.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv_det;
  if (t < -kBehind) return std::nullopt;
  return std::max(t, 0.0);
}

std::optional<double> ray_triangle_intersect(const Vec3& origin, const Vec3& direction,
                                             const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  require_unit_direction(direction);
  return ray_triangle_intersect_unchecked(origin, direction, v0, v1, v2);
}

SphereDdf analytic_sphere_ddf(const Vec3& center, double radius, const Vec3& origin,
                              const Vec3& direction) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  require_unit_direction(direction);
  const Vec3 oc = origin - center;
  const double b = oc.dot(direction);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return {};
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots of t^2 + 2 b t + c = 0.
  const double q = b > 0.0 ? -b - root : -b + root;
  double t_near = q;
  double t_far = q;
  if (q != 0.0) {
    const double other = c / q;
    t_near = std::min(q, other);
    t_far = std::max(q, other);
  } else {
    t_near = std::min(0.0, -2.0 * b);
    t_far = std::max(0.0, -2.0 * b);
  }
  if (t_near >= 0.0) return {true, t_near};
  if (t_far >= 0.0) return {true, t_far};
  return {};
}

}  // namespace ddf
