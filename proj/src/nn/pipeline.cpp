#include "ddf/nn/pipeline.hpp"

namespace ddf::nn {

RayInput FeatureContext::make_input(const Ray& ray) const {
  RayInput in;
  in.ray = ray;
  in.image = collect_ray_feature_inputs(pyramid, camera, ray, samples_along_ray, spacing);
  in.hand_global = global_hand_embedding(ray, skeleton);
  in.hand_local = hand_local_feature(ray, skeleton, k_3d);
  return in;
}

NetworkConfig FeatureContext::network_config(NetworkConfig base) const {
  base.feature_channels = pyramid.total_channels();
  base.samples_along_ray = samples_along_ray;
  base.k_3d = k_3d;
  base.joints = static_cast<int>(skeleton.joint_count());
  return base;
}

CameraPose default_camera(int height, int width) {
  CameraPose cam;
  cam.fx = width;
  cam.fy = width;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.rotation = Vec3(1.0, -1.0, -1.0).asDiagonal();
  cam.translation = Vec3(0.0, 0.0, 3.0);
  return cam;
}

FeatureContext make_synthetic_context(const TriangleMesh& mesh, const HandPose& pose,
                                      std::uint64_t seed, const SyntheticPyramidOptions& options) {
  FeatureContext ctx;
  ctx.camera = default_camera(options.height, options.width);
  SyntheticPyramidOptions opts = options;
  opts.seed = seed;
  ctx.pyramid = make_synthetic_pyramid(mesh, ctx.camera, opts);
  ctx.skeleton = forward_kinematics(default_rest_skeleton(), pose);
  return ctx;
}

std::vector<TrainingSample> make_training_samples(const FeatureContext& context,
                                                  const std::vector<DdfSample>& samples) {
  std::vector<TrainingSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({context.make_input(s.ray), LossTarget::from_sample(s)});
  }
  return out;
}

std::vector<PairInput> make_pair_inputs(const FeatureContext& context,
                                        const std::vector<SymmetryPair>& pairs) {
  std::vector<PairInput> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({context.make_input(p.a), context.make_input(p.b)});
  return out;
}

}  // namespace ddf::nn
