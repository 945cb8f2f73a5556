#include "ddf/io/formats.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "binary.hpp"

namespace ddf::io {
namespace {

using detail::Reader;
using detail::Writer;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void put_vec(Writer& w, const Vec3& v) {
  for (int k = 0; k < 3; ++k) w.put(static_cast<float>(v[k]));
}

Vec3 get_vec(Reader& r, const char* field) {
  Vec3 v;
  for (int k = 0; k < 3; ++k) v[k] = r.get<float>(field);
  return v;
}

void expect_magic(Reader& r, const char* magic) {
  if (r.bytes(4, "magic") != magic) r.fail("bad magic");
}

}  // namespace

void write_ray_dataset(std::ostream& out, const RayDataset& data) {
  if (data.paired && data.samples.size() % 2 != 0) {
    throw std::invalid_argument("paired dataset needs an even number of rays");
  }
  Writer w(out);
  w.bytes("DDFR");
  w.put(kRayDatasetVersion);
  w.put(static_cast<std::uint64_t>(data.samples.size()));
  w.put(static_cast<std::uint16_t>((data.has_ground_truth ? kFlagGroundTruth : 0) |
                                   (data.paired ? kFlagPaired : 0)));
  for (const auto& s : data.samples) {
    put_vec(w, s.ray.origin);
    put_vec(w, s.ray.direction);
    const bool visible = data.has_ground_truth && s.depth.has_value();
    w.put(static_cast<std::uint8_t>(visible ? 1 : 0));
    w.put(visible ? static_cast<float>(*s.depth) : std::numeric_limits<float>::quiet_NaN());
  }
  if (!out) throw std::runtime_error("DDFR: write failed");
}

void save_ray_dataset(const std::string& path, const RayDataset& data) {
  auto out = open_out(path);
  write_ray_dataset(out, data);
}

RayDataset read_ray_dataset(std::istream& in) {
  Reader r(in, "DDFR");
  expect_magic(r, "DDFR");
  if (const auto v = r.get<std::uint16_t>("version"); v != kRayDatasetVersion) {
    r.fail("unsupported version " + std::to_string(v));
  }
  const auto count = r.get<std::uint64_t>("count");
  const auto flags = r.get<std::uint16_t>("flags");
  if (flags & ~(kFlagGroundTruth | kFlagPaired)) r.fail("unknown flag bits");
  RayDataset data;
  data.has_ground_truth = flags & kFlagGroundTruth;
  data.paired = flags & kFlagPaired;
  if (data.paired && count % 2 != 0) r.fail("paired file has odd record count");
  data.samples.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string rec = "record " + std::to_string(i);
    DdfSample s;
    s.ray.origin = get_vec(r, "origin");
    s.ray.direction = get_vec(r, "direction");
    const auto xi = r.get<std::uint8_t>("xi");
    const auto depth = r.get<float>("depth");
    if (!s.ray.origin.allFinite()) r.fail(rec + ": origin is not finite");
    const double norm = s.ray.direction.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) r.fail(rec + ": direction is not unit-norm");
    s.ray.direction /= norm;
    if (xi > 1) r.fail(rec + ": xi must be 0 or 1");
    if (data.has_ground_truth) {
      if (xi == 1) {
        if (!std::isfinite(depth) || depth < 0.0f) r.fail(rec + ": depth must be finite and >= 0");
        s.depth = depth;
      } else if (!std::isnan(depth)) {
        r.fail(rec + ": depth must be NaN when xi = 0");
      }
    }
    data.samples.push_back(s);
  }
  r.expect_end();
  return data;
}

RayDataset load_ray_dataset(const std::string& path) {
  auto in = open_in(path);
  return read_ray_dataset(in);
}

RayDataset pairs_to_dataset(const std::vector<SymmetryPair>& pairs) {
  RayDataset data;
  data.paired = true;
  for (const auto& p : pairs) {
    data.samples.push_back({p.a, std::nullopt});
    data.samples.push_back({p.b, std::nullopt});
  }
  return data;
}

std::vector<SymmetryPair> dataset_to_pairs(const RayDataset& data) {
  if (!data.paired) throw std::runtime_error("DDFR: file is not a paired dataset");
  std::vector<SymmetryPair> out;
  for (std::size_t i = 0; i + 1 < data.samples.size(); i += 2) {
    SymmetryPair p;
    p.a = data.samples[i].ray;
    p.b = data.samples[i + 1].ray;
    out.push_back(p);
  }
  return out;
}

void write_pyramid(std::ostream& out, const FeaturePyramid& pyramid) {
  pyramid.validate();
  Writer w(out);
  w.bytes("DDFP");
  w.put(kPyramidVersion);
  w.put(static_cast<std::uint32_t>(pyramid.levels.size()));
  for (const auto& g : pyramid.levels) {
    w.put(static_cast<std::uint32_t>(g.height));
    w.put(static_cast<std::uint32_t>(g.width));
    w.put(static_cast<std::uint32_t>(g.channels));
    for (double v : g.data) w.put(static_cast<float>(v));
  }
  if (!out) throw std::runtime_error("DDFP: write failed");
}

void save_pyramid(const std::string& path, const FeaturePyramid& pyramid) {
  auto out = open_out(path);
  write_pyramid(out, pyramid);
}

FeaturePyramid read_pyramid(std::istream& in) {
  Reader r(in, "DDFP");
  expect_magic(r, "DDFP");
  if (const auto v = r.get<std::uint16_t>("version"); v != kPyramidVersion) {
    r.fail("unsupported version " + std::to_string(v));
  }
  const auto levels = r.get<std::uint32_t>("level count");
  if (levels == 0) r.fail("level count must be >= 1");
  FeaturePyramid p;
  for (std::uint32_t l = 0; l < levels; ++l) {
    FeatureGrid g;
    g.height = static_cast<int>(r.get<std::uint32_t>("height"));
    g.width = static_cast<int>(r.get<std::uint32_t>("width"));
    g.channels = static_cast<int>(r.get<std::uint32_t>("channels"));
    if (g.height <= 0 || g.width <= 0 || g.channels <= 0 || g.height > 1 << 15 || g.width > 1 << 15 ||
        g.channels > 1 << 12) {
      r.fail("level " + std::to_string(l) + ": bad dimensions");
    }
    const std::size_t n = static_cast<std::size_t>(g.height) * g.width * g.channels;
    g.data.resize(n);
    for (auto& v : g.data) v = r.get<float>("level data");
    p.levels.push_back(std::move(g));
  }
  r.expect_end();
  try {
    p.validate();
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
  return p;
}

FeaturePyramid load_pyramid(const std::string& path) {
  auto in = open_in(path);
  return read_pyramid(in);
}

std::string network_config_json(const nn::NetworkConfig& c) {
  nlohmann::ordered_json j;
  j["width"] = c.width;
  j["pe_bands"] = {c.pe_bands_origin, c.pe_bands_dir};
  j["heads"] = c.heads;
  j["feature_channels"] = c.feature_channels;
  j["K_l"] = c.samples_along_ray;
  j["K_3D"] = c.k_3d;
  j["joints"] = c.joints;
  return j.dump();
}

nn::NetworkConfig network_config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const auto& n = j.contains("network") ? j.at("network") : j;
  nn::NetworkConfig c;
  c.width = n.at("width").get<int>();
  c.pe_bands_origin = n.at("pe_bands").at(0).get<int>();
  c.pe_bands_dir = n.at("pe_bands").at(1).get<int>();
  c.heads = n.at("heads").get<int>();
  c.feature_channels = n.at("feature_channels").get<int>();
  c.samples_along_ray = n.at("K_l").get<int>();
  c.k_3d = n.at("K_3D").get<int>();
  c.joints = n.at("joints").get<int>();
  c.validate();
  return c;
}

void write_checkpoint(std::ostream& out, const nn::DdfModel& model, const std::string& config_json) {
  model.validate();
  Writer w(out);
  w.bytes("DDFN");
  w.put(kCheckpointVersion);
  w.put(static_cast<std::uint32_t>(config_json.size()));
  w.bytes(config_json);
  const auto params = model.parameters();
  w.put(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.put(static_cast<std::uint16_t>(p.name.size()));
    w.bytes(p.name);
    w.put(static_cast<std::uint8_t>(p.tensor->shape.size()));
    for (auto d : p.tensor->shape) w.put(static_cast<std::uint32_t>(d));
    for (float v : p.tensor->data) w.put(v);
  }
  if (!out) throw std::runtime_error("DDFN: write failed");
}

void save_checkpoint(const std::string& path, const nn::DdfModel& model,
                     const std::string& config_json) {
  auto out = open_out(path);
  write_checkpoint(out, model, config_json);
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in, "DDFN");
  expect_magic(r, "DDFN");
  if (const auto v = r.get<std::uint16_t>("version"); v != kCheckpointVersion) {
    r.fail("unsupported version " + std::to_string(v));
  }
  const auto len = r.get<std::uint32_t>("config length");
  if (len > (1u << 24)) r.fail("config length too large");
  Checkpoint ck;
  ck.config_json = r.bytes(len, "config");
  nn::NetworkConfig config;
  try {
    config = network_config_from_json(ck.config_json);
  } catch (const std::exception& e) {
    r.fail(std::string("config: ") + e.what());
  }
  ck.model = nn::DdfModel::initialize(config, 0);
  auto params = ck.model.parameters();
  const auto blocks = r.get<std::uint32_t>("block count");
  if (blocks != params.size()) {
    r.fail("block count " + std::to_string(blocks) + " != expected " + std::to_string(params.size()));
  }
  for (auto& p : params) {
    const auto name_len = r.get<std::uint16_t>("name length");
    const std::string name = r.bytes(name_len, "name");
    if (name != p.name) r.fail("block '" + name + "' where '" + p.name + "' was expected");
    const auto rank = r.get<std::uint8_t>("rank");
    if (rank != p.tensor->shape.size()) r.fail(p.name + ": rank mismatch");
    for (std::size_t k = 0; k < rank; ++k) {
      if (r.get<std::uint32_t>("dims") != p.tensor->shape[k]) r.fail(p.name + ": shape mismatch");
    }
    for (auto& v : p.tensor->data) v = r.get<float>("data");
  }
  r.expect_end();
  try {
    ck.model.validate();
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
  return ck;
}

Checkpoint load_checkpoint(const std::string& path) {
  auto in = open_in(path);
  return read_checkpoint(in);
}

}  // namespace ddf::io
