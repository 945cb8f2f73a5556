#include "ddf/recon/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ddf/recon/kdtree.hpp"

namespace ddf {

void PointCloud::validate() const {
  if (!(mm_per_unit > 0.0) || !std::isfinite(mm_per_unit)) {
    throw std::invalid_argument("point cloud scale must be positive");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw std::invalid_argument("point " + std::to_string(i) + " is not finite");
    }
  }
}

namespace {

std::vector<Vec3> in_mm(const PointCloud& c) {
  std::vector<Vec3> out;
  out.reserve(c.size());
  for (const auto& p : c.points) out.push_back(p * c.mm_per_unit);
  return out;
}

void check_pair(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty point cloud");
  a.validate();
  b.validate();
  if (a.mm_per_unit != b.mm_per_unit) {
    throw std::invalid_argument("point clouds have different scale factors");
  }
}

// Squared nearest-neighbour distance from every point of `from` to `to`.
std::vector<double> nn_squared(const std::vector<Vec3>& from, const KdTree& to) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& p : from) out.push_back(to.nearest(p).squared_distance);
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
  check_pair(a, b);
  const auto pa = in_mm(a);
  const auto pb = in_mm(b);
  const KdTree ta(pa), tb(pb);
  return mean(nn_squared(pa, tb)) + mean(nn_squared(pb, ta));
}

double f_score(const PointCloud& a, const PointCloud& b, double tau_mm) {
  check_pair(a, b);
  if (!(tau_mm > 0.0)) throw std::invalid_argument("tau must be positive");
  const auto pa = in_mm(a);
  const auto pb = in_mm(b);
  const KdTree ta(pa), tb(pb);
  const double t2 = tau_mm * tau_mm;
  auto fraction = [&](const std::vector<Vec3>& from, const KdTree& to) {
    std::size_t hit = 0;
    for (const auto& p : from) hit += to.nearest(p).squared_distance <= t2;
    return static_cast<double>(hit) / static_cast<double>(from.size());
  };
  const double precision = fraction(pa, tb);
  const double recall = fraction(pb, ta);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricsReport evaluate_clouds(const PointCloud& predicted, const PointCloud& reference) {
  MetricsReport r;
  r.f5 = f_score(predicted, reference, 5.0);
  r.f10 = f_score(predicted, reference, 10.0);
  r.cd = chamfer_distance(predicted, reference);
  r.predicted_points = predicted.size();
  r.reference_points = reference.size();
  return r;
}

}  // namespace ddf
