#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddf/nn/model.hpp"
#include "ddf/projection/pyramid.hpp"
#include "ddf/sampling/ray.hpp"

namespace ddf::io {

inline constexpr std::uint16_t kRayDatasetVersion = 1;
inline constexpr std::uint16_t kPyramidVersion = 1;
inline constexpr std::uint16_t kCheckpointVersion = 1;

inline constexpr std::uint16_t kFlagGroundTruth = 1u << 0;
inline constexpr std::uint16_t kFlagPaired = 1u << 1;

/// DDFR file: "DDFR", u16 version, u64 count, u16 flags, then per ray
/// 3 x f32 origin, 3 x f32 direction, u8 xi, f32 depth (NaN when xi = 0).
/// Paired files hold symmetry pairs as consecutive records (a, b).
struct RayDataset {
  std::vector<DdfSample> samples;  // depth empty when !has_ground_truth
  bool has_ground_truth = false;
  bool paired = false;
};

void write_ray_dataset(std::ostream& out, const RayDataset& data);
void save_ray_dataset(const std::string& path, const RayDataset& data);
/// Directions are checked to be unit within 1e-6 and then renormalised in
/// double precision. Throws std::runtime_error naming the first violated
/// field.
RayDataset read_ray_dataset(std::istream& in);
RayDataset load_ray_dataset(const std::string& path);

RayDataset pairs_to_dataset(const std::vector<SymmetryPair>& pairs);
std::vector<SymmetryPair> dataset_to_pairs(const RayDataset& data);

/// DDFP file: "DDFP", u16 version, u32 levels, then per level u32 height,
/// u32 width, u32 channels and row-major f32 values.
void write_pyramid(std::ostream& out, const FeaturePyramid& pyramid);
void save_pyramid(const std::string& path, const FeaturePyramid& pyramid);
FeaturePyramid read_pyramid(std::istream& in);
FeaturePyramid load_pyramid(const std::string& path);

/// DDFN file: "DDFN", u16 version, u32 length + JSON config echo, u32 block
/// count, then per parameter u16 name length, name, u8 rank, u32 dims and
/// f32 data, in canonical parameter order.
struct Checkpoint {
  nn::DdfModel model;
  std::string config_json;  // echo of the run configuration
};

void write_checkpoint(std::ostream& out, const nn::DdfModel& model, const std::string& config_json);
void save_checkpoint(const std::string& path, const nn::DdfModel& model,
                     const std::string& config_json);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

/// Network configuration as stored in the checkpoint echo.
std::string network_config_json(const nn::NetworkConfig& config);
nn::NetworkConfig network_config_from_json(const std::string& json);

}  // namespace ddf::io
