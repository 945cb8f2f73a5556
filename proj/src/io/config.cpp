#include "ddf/io/config.hpp"

#include "ddf/io/formats.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace ddf::io {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw std::runtime_error("config: " + msg);
}

Vec3 vec3_of(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) config_error(key + " must be an array of 3 numbers");
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = j.at(k).get<double>();
  if (!v.allFinite()) config_error(key + " must be finite");
  return v;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

CameraPose camera_of(const json& j) {
  reject_unknown(j, {"fx", "fy", "cx", "cy", "rotation", "translation"}, "camera");
  CameraPose cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  if (j.contains("rotation")) {
    const auto& r = j.at("rotation");
    if (!r.is_array() || r.size() != 9) config_error("camera.rotation must be 9 numbers (row-major)");
    for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r.at(i).get<double>();
  }
  if (j.contains("translation")) cam.translation = vec3_of(j.at("translation"), "camera.translation");
  try {
    cam.validate();
  } catch (const std::exception& e) {
    config_error(std::string("camera: ") + e.what());
  }
  return cam;
}

json camera_to_json(const CameraPose& cam) {
  json r = json::array();
  for (int i = 0; i < 9; ++i) r.push_back(cam.rotation(i / 3, i % 3));
  return {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy}, {"rotation", r},
          {"translation", vec3_json(cam.translation)}};
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return std::filesystem::absolute(std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <class T>
void read_positive(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  out = j.at(key).get<T>();
  if (!(out > 0)) config_error(std::string(key) + " must be positive");
}

}  // namespace

nn::NetworkConfig RunConfig::network(int feature_channels, int joints) const {
  nn::NetworkConfig c;
  c.width = width;
  c.pe_bands_origin = pe_bands_origin;
  c.pe_bands_dir = pe_bands_dir;
  c.heads = heads;
  c.feature_channels = feature_channels;
  c.samples_along_ray = k_l;
  c.k_3d = k_3d;
  c.joints = joints;
  c.validate();
  return c;
}

nn::TrainConfig RunConfig::training() const {
  nn::TrainConfig t;
  t.epochs = epochs;
  t.batch = batch;
  t.learning_rate = lr;
  t.lambda1 = lambda1;
  t.lambda2 = lambda2;
  t.seed = seed;
  return t;
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"width", "pe_bands", "heads", "K_l", "K_3D", "lambda1", "lambda2", "lr", "epochs",
                  "batch", "seed", "rays", "pairs", "pyramid", "mesh", "skeleton", "hand_pose",
                  "camera", "symmetry_plane", "bounds", "pixel_spacing", "threads", "normalize_mesh"},
                 "");
  RunConfig c;
  try {
    read_positive(j, "width", c.width);
    if (j.contains("pe_bands")) {
      const auto& pb = j.at("pe_bands");
      if (pb.is_number_integer()) {
        c.pe_bands_origin = c.pe_bands_dir = pb.get<int>();
      } else if (pb.is_array() && pb.size() == 2) {
        c.pe_bands_origin = pb.at(0).get<int>();
        c.pe_bands_dir = pb.at(1).get<int>();
      } else {
        config_error("pe_bands must be an integer or [origin, direction]");
      }
      if (c.pe_bands_origin < 0 || c.pe_bands_dir < 0) config_error("pe_bands must be >= 0");
    }
    read_positive(j, "heads", c.heads);
    read_positive(j, "K_l", c.k_l);
    read_positive(j, "K_3D", c.k_3d);
    if (j.contains("lambda1")) c.lambda1 = j.at("lambda1").get<double>();
    if (j.contains("lambda2")) c.lambda2 = j.at("lambda2").get<double>();
    if (c.lambda1 < 0.0 || c.lambda2 < 0.0) config_error("lambda1 and lambda2 must be >= 0");
    read_positive(j, "lr", c.lr);
    read_positive(j, "epochs", c.epochs);
    read_positive(j, "batch", c.batch);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("rays")) config_error("missing key 'rays'");
    c.rays = resolve(base_dir, j.at("rays").get<std::string>());
    if (j.contains("pairs")) c.pairs = resolve(base_dir, j.at("pairs").get<std::string>());
    if (j.contains("pyramid")) c.pyramid = resolve(base_dir, j.at("pyramid").get<std::string>());
    if (j.contains("mesh")) c.mesh = resolve(base_dir, j.at("mesh").get<std::string>());
    if (j.contains("normalize_mesh")) c.normalize_mesh = j.at("normalize_mesh").get<bool>();
    if (j.contains("skeleton")) c.skeleton = resolve(base_dir, j.at("skeleton").get<std::string>());
    if (!c.pyramid && !c.mesh) config_error("one of 'pyramid' or 'mesh' is required");
    if (j.contains("hand_pose")) {
      c.hand_pose = j.at("hand_pose").get<std::vector<double>>();
      if (c.hand_pose.size() != 45) config_error("hand_pose must have 45 values");
    }
    if (j.contains("camera")) c.camera = camera_of(j.at("camera"));
    if (j.contains("symmetry_plane")) {
      const auto& sp = j.at("symmetry_plane");
      reject_unknown(sp, {"point", "normal"}, "symmetry_plane");
      Plane p{vec3_of(sp.at("point"), "symmetry_plane.point"),
              vec3_of(sp.at("normal"), "symmetry_plane.normal")};
      if (p.normal.norm() == 0.0) config_error("symmetry_plane.normal must be non-zero");
      p.normal.normalize();
      c.symmetry_plane = p;
    }
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      reject_unknown(b, {"min", "max"}, "bounds");
      c.bounds.min = vec3_of(b.at("min"), "bounds.min");
      c.bounds.max = vec3_of(b.at("max"), "bounds.max");
      c.bounds.validate();
    }
    read_positive(j, "pixel_spacing", c.pixel_spacing);
    read_positive(j, "threads", c.threads);
  } catch (const json::exception& e) {
    config_error(e.what());
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
  if (c.width <= 0 || c.heads <= 0) config_error("width and heads must be positive");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_run_config(ss.str(), dir.empty() ? "." : dir.string());
}

std::string run_config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["width"] = c.width;
  j["pe_bands"] = {c.pe_bands_origin, c.pe_bands_dir};
  j["heads"] = c.heads;
  j["K_l"] = c.k_l;
  j["K_3D"] = c.k_3d;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["lr"] = c.lr;
  j["epochs"] = c.epochs;
  j["batch"] = c.batch;
  j["seed"] = c.seed;
  j["rays"] = c.rays;
  if (c.pairs) j["pairs"] = *c.pairs;
  if (c.pyramid) j["pyramid"] = *c.pyramid;
  if (c.mesh) j["mesh"] = *c.mesh;
  j["normalize_mesh"] = c.normalize_mesh;
  if (c.skeleton) j["skeleton"] = *c.skeleton;
  if (!c.hand_pose.empty()) j["hand_pose"] = c.hand_pose;
  if (c.camera) j["camera"] = camera_to_json(*c.camera);
  if (c.symmetry_plane) {
    j["symmetry_plane"] = {{"point", vec3_json(c.symmetry_plane->point)},
                           {"normal", vec3_json(c.symmetry_plane->normal)}};
  }
  j["bounds"] = {{"min", vec3_json(c.bounds.min)}, {"max", vec3_json(c.bounds.max)}};
  j["pixel_spacing"] = c.pixel_spacing;
  j["threads"] = c.threads;
  return j.dump(2);
}

std::string checkpoint_echo_json(const RunConfig& config, const nn::NetworkConfig& network) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(run_config_json(config));
  j["network"] = nlohmann::ordered_json::parse(network_config_json(network));
  return j.dump();
}

RunConfig run_config_from_echo(const std::string& echo_json) {
  json j;
  try {
    j = json::parse(echo_json);
  } catch (const json::exception& e) {
    config_error(std::string("invalid checkpoint echo: ") + e.what());
  }
  if (!j.contains("config")) config_error("checkpoint echo has no 'config'");
  return parse_run_config(j.at("config").dump(), "/");
}

CameraPose parse_camera_json(const std::string& text) {
  try {
    return camera_of(json::parse(text));
  } catch (const json::exception& e) {
    config_error(std::string("camera: ") + e.what());
  }
}

std::string camera_json(const CameraPose& camera) { return camera_to_json(camera).dump(2); }

}  // namespace ddf::io
