#include "ddf/projection/camera.hpp"

#include <stdexcept>

namespace ddf {

void CameraPose::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("focal lengths must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy) || !translation.allFinite() ||
      !rotation.allFinite()) {
    throw std::invalid_argument("camera parameters must be finite");
  }
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-7) {
    throw std::invalid_argument("camera rotation is not orthonormal");
  }
}

Vec3 CameraPose::pixel_direction(const Vec2& pixel) const {
  const Vec3 cam((pixel.x() - cx) / fx, (pixel.y() - cy) / fy, 1.0);
  return (rotation.transpose() * cam).normalized();
}

Vec2 project_point(const CameraPose& camera, const Vec3& point) {
  const Vec3 c = camera.rotation * point + camera.translation;
  if (!(c.z() > kMinDepth)) throw std::domain_error("behind camera");
  return {camera.fx * c.x() / c.z() + camera.cx, camera.fy * c.y() / c.z() + camera.cy};
}

Ray2D project_ray(const CameraPose& camera, const Ray& ray, double offset) {
  Ray2D out;
  out.p = project_point(camera, ray.origin);
  const Vec2 q = project_point(camera, ray.at(offset));
  const Vec2 d = q - out.p;
  const double len = d.norm();
  if (len >= kDegenerateTolerance) out.direction = d / len;
  return out;
}

std::vector<Vec2> sample_2d_points(const Ray2D& ray, int count, double spacing) {
  if (ray.degenerate()) throw std::invalid_argument("degenerate ray has no 2D direction");
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  std::vector<Vec2> pts;
  pts.reserve(count);
  for (int i = 1; i <= count; ++i) pts.push_back(ray.p + (i * spacing) * *ray.direction);
  return pts;
}

}  // namespace ddf
