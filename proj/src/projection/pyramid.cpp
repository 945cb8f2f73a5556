#include "ddf/projection/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ddf/common/rng.hpp"
#include "ddf/geometry/bvh.hpp"

namespace ddf {

std::pair<int, int> level_size(int height, int width, int level) {
  for (int l = 0; l < level; ++l) {
    height = (height + 1) / 2;
    width = (width + 1) / 2;
  }
  return {height, width};
}

void FeaturePyramid::validate() const {
  if (levels.empty()) throw std::invalid_argument("empty pyramid");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& g = levels[l];
    const std::string tag = "pyramid level " + std::to_string(l);
    if (g.height < 1 || g.width < 1 || g.channels < 1) {
      throw std::invalid_argument(tag + " has a zero dimension");
    }
    if (g.data.size() != std::size_t(g.height) * g.width * g.channels) {
      throw std::invalid_argument(tag + " data size does not match its shape");
    }
    if (l > 0) {
      const auto& prev = levels[l - 1];
      if (g.height != (prev.height + 1) / 2 || g.width != (prev.width + 1) / 2) {
        throw std::invalid_argument(tag + " is not half the resolution of the previous level");
      }
    }
    for (double v : g.data) {
      if (!std::isfinite(v)) throw std::invalid_argument(tag + " holds a non-finite value");
    }
  }
}

int FeaturePyramid::total_channels() const {
  int c = 0;
  for (const auto& g : levels) c += g.channels;
  return c;
}

FeatureVector bilinear_sample(const FeaturePyramid& pyramid, const Vec2& point) {
  if (pyramid.levels.empty()) throw std::invalid_argument("empty pyramid");
  const auto& base = pyramid.levels.front();
  FeatureVector out;
  out.reserve(pyramid.total_channels());
  for (const auto& g : pyramid.levels) {
    const double sx = static_cast<double>(g.width) / base.width;
    const double sy = static_cast<double>(g.height) / base.height;
    const double x = std::clamp(point.x() * sx, 0.0, static_cast<double>(g.width - 1));
    const double y = std::clamp(point.y() * sy, 0.0, static_cast<double>(g.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, g.width - 1);
    const int y1 = std::min(y0 + 1, g.height - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    for (int c = 0; c < g.channels; ++c) {
      const double top = (1.0 - ax) * g.at(y0, x0, c) + ax * g.at(y0, x1, c);
      const double bottom = (1.0 - ax) * g.at(y1, x0, c) + ax * g.at(y1, x1, c);
      out.push_back((1.0 - ay) * top + ay * bottom);
    }
  }
  return out;
}

FeaturePyramid make_synthetic_pyramid(const TriangleMesh& mesh, const CameraPose& camera,
                                      const SyntheticPyramidOptions& options) {
  if (options.height < 1 || options.width < 1 || options.levels < 1) {
    throw std::invalid_argument("pyramid dimensions must be positive");
  }
  if (options.noise_cells < 1) throw std::invalid_argument("noise_cells must be >= 1");
  camera.validate();
  const MeshCaster caster(mesh);
  const Vec3 eye = camera.center();
  Rng noise_rng = make_rng(options.seed, RngStream::kPyramidNoise);

  FeaturePyramid pyramid;
  for (int l = 0; l < options.levels; ++l) {
    const auto [h, w] = level_size(options.height, options.width, l);
    FeatureGrid grid(h, w, kSyntheticChannelsPerLevel);

    const int n = options.noise_cells + 1;
    std::vector<double> lattice(std::size_t(n) * n);
    for (auto& v : lattice) v = noise_rng.uniform(-1.0, 1.0);

    const double to_base_x = static_cast<double>(options.width) / w;
    const double to_base_y = static_cast<double>(options.height) / h;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Vec2 base_px(x * to_base_x, y * to_base_y);
        grid.at(y, x, 0) = base_px.x() / options.width;
        grid.at(y, x, 1) = base_px.y() / options.height;

        const double gx = (w > 1 ? double(x) / (w - 1) : 0.0) * options.noise_cells;
        const double gy = (h > 1 ? double(y) / (h - 1) : 0.0) * options.noise_cells;
        const int ix = std::min(static_cast<int>(gx), options.noise_cells - 1);
        const int iy = std::min(static_cast<int>(gy), options.noise_cells - 1);
        const double fx = gx - ix;
        const double fy = gy - iy;
        auto lat = [&](int i, int j) { return lattice[std::size_t(j) * n + i]; };
        const double top = (1 - fx) * lat(ix, iy) + fx * lat(ix + 1, iy);
        const double bottom = (1 - fx) * lat(ix, iy + 1) + fx * lat(ix + 1, iy + 1);
        grid.at(y, x, 2) = options.noise_amplitude * ((1 - fy) * top + fy * bottom);

        const Vec3 dir = camera.pixel_direction(base_px);
        grid.at(y, x, 3) = caster.cast(eye, dir) ? 1.0 : 0.0;
      }
    }
    pyramid.levels.push_back(std::move(grid));
  }
  return pyramid;
}

RayFeatureInputs collect_ray_feature_inputs(const FeaturePyramid& pyramid,
                                            const CameraPose& camera, const Ray& ray,
                                            int samples_along_ray, double spacing) {
  const Ray2D projected = project_ray(camera, ray);
  RayFeatureInputs out;
  out.query = bilinear_sample(pyramid, projected.p);
  out.degenerate = projected.degenerate();
  if (out.degenerate) return out;
  for (const auto& q : sample_2d_points(projected, samples_along_ray, spacing)) {
    out.along_ray.push_back(bilinear_sample(pyramid, q));
  }
  return out;
}

}  // namespace ddf
