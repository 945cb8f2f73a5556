#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddf/nn/train.hpp"
#include "ddf/projection/camera.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::io {

/// Everything `fit` needs. Paths are resolved against the directory of the
/// config file. Defaults: width 128, pe_bands [6, 4], heads 2, K_l 8,
/// K_3D 8, lambda1 5.0, lambda2 0.5, lr 1e-4, epochs 100, batch 512,
/// seed 0, pixel_spacing 4, threads 1, bounds [-1, 1]^3.
struct RunConfig {
  int width = 128;
  int pe_bands_origin = 6;
  int pe_bands_dir = 4;
  int heads = 2;
  int k_l = 8;
  int k_3d = 8;
  double lambda1 = nn::kDefaultLambda1;
  double lambda2 = nn::kDefaultLambda2;
  double lr = 1e-4;
  int epochs = 100;
  int batch = 512;
  std::uint64_t seed = 0;

  std::string rays;                    // DDFR with ground truth (required)
  std::optional<std::string> pairs;    // paired DDFR
  std::optional<std::string> pyramid;  // DDFP; synthesised from `mesh` when absent
  std::optional<std::string> mesh;     // OBJ
  bool normalize_mesh = false;         // fit the mesh to [-0.9, 0.9]^3 on load
  std::optional<std::string> skeleton; // rest skeleton text; bundled default when absent
  std::vector<double> hand_pose;       // 45 values, zero pose when empty
  std::optional<CameraPose> camera;    // default_camera of the pyramid size when absent
  std::optional<Plane> symmetry_plane;
  BoundingVolume bounds;
  double pixel_spacing = 4.0;
  int threads = 1;

  nn::NetworkConfig network(int feature_channels, int joints) const;
  nn::TrainConfig training() const;
};

/// Throws std::runtime_error naming the first unknown key or bad value.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

/// Canonical JSON rendering with resolved paths; parse_run_config accepts
/// it back unchanged.
std::string run_config_json(const RunConfig& config);

/// Checkpoint echo: {"config": run config, "network": network config}.
std::string checkpoint_echo_json(const RunConfig& config, const nn::NetworkConfig& network);
RunConfig run_config_from_echo(const std::string& echo_json);

CameraPose parse_camera_json(const std::string& json_text);
std::string camera_json(const CameraPose& camera);

}  // namespace ddf::io
