#include "ddf/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddf/common/rng.hpp"
#include "ddf/io/config.hpp"
#include "ddf/io/formats.hpp"
#include "ddf/io/mesh_io.hpp"
#include "ddf/nn/gradcheck.hpp"
#include "ddf/nn/pipeline.hpp"
#include "ddf/recon/field.hpp"
#include "ddf/recon/metrics.hpp"
#include "ddf/sampling/sampler.hpp"

namespace ddf::cli {
namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint64_t> seed_override() {
  const char* env = std::getenv("DDF_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used, 10);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("DDF_SEED is not an unsigned integer: ") + env);
  }
}

std::uint64_t effective_seed(std::uint64_t flag) { return seed_override().value_or(flag); }

BoundingVolume bounds_from(const std::vector<double>& lo, const std::vector<double>& hi) {
  BoundingVolume b;
  if (!lo.empty()) b.min = Vec3(lo[0], lo[1], lo[2]);
  if (!hi.empty()) b.max = Vec3(hi[0], hi[1], hi[2]);
  b.validate();
  return b;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

HandPose pose_from(const std::vector<double>& values) {
  if (values.empty()) return HandPose::zero();
  HandPose p;
  p.theta = values;
  return p.canonical();
}

nn::FeatureContext context_from(const io::RunConfig& cfg) {
  nn::FeatureContext ctx;
  if (cfg.pyramid) {
    ctx.pyramid = io::load_pyramid(*cfg.pyramid);
  } else {
    const auto mesh = io::load_obj(*cfg.mesh, cfg.normalize_mesh).mesh;
    SyntheticPyramidOptions opts;
    opts.seed = cfg.seed;
    const CameraPose cam = cfg.camera.value_or(nn::default_camera(opts.height, opts.width));
    ctx.pyramid = make_synthetic_pyramid(mesh, cam, opts);
  }
  const auto& finest = ctx.pyramid.levels.front();
  ctx.camera = cfg.camera.value_or(nn::default_camera(finest.height, finest.width));
  const HandSkeleton rest = cfg.skeleton ? load_skeleton(*cfg.skeleton) : default_rest_skeleton();
  ctx.skeleton = forward_kinematics(rest, pose_from(cfg.hand_pose));
  ctx.samples_along_ray = cfg.k_l;
  ctx.spacing = cfg.pixel_spacing;
  ctx.k_3d = cfg.k_3d;
  return ctx;
}

// Ground-truth field selected by --mesh / --sphere.
std::unique_ptr<FieldEvaluator> truth_field(const std::string& mesh_path, bool normalize,
                                            double sphere) {
  if (!mesh_path.empty()) {
    return std::make_unique<MeshField>(io::load_obj(mesh_path, normalize).mesh);
  }
  if (sphere > 0.0) return std::make_unique<AnalyticSphereField>(Vec3::Zero(), sphere);
  throw UsageError("one of --mesh or --sphere is required");
}

ordered_json metrics_json(const MetricsReport& r) {
  ordered_json j;
  j["f5"] = r.f5;
  j["f10"] = r.f10;
  j["cd"] = r.cd;
  j["convention"] = kChamferConvention;
  j["units"] = kChamferUnits;
  j["predicted_points"] = r.predicted_points;
  j["reference_points"] = r.reference_points;
  return j;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text << '\n';
  } else {
    write_text(path, text + "\n");
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Directed distance field toolkit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // gen-rays
  auto* gen_rays = app.add_subcommand("gen-rays", "Sample rays (and symmetry pairs) into a DDFR file");
  std::size_t ray_count = 0, pair_count = 0;
  std::uint64_t seed = 0;
  std::string out_path, pairs_out, surface_mesh;
  std::vector<double> bmin, bmax, plane;
  bool normalize = false;
  gen_rays->add_option("--count", ray_count, "Number of rays")->required()->check(CLI::PositiveNumber);
  gen_rays->add_option("--seed", seed, "Random seed (DDF_SEED overrides)");
  gen_rays->add_option("--out", out_path, "Output DDFR")->required();
  gen_rays->add_option("--bounds-min", bmin)->expected(3);
  gen_rays->add_option("--bounds-max", bmax)->expected(3);
  gen_rays->add_option("--surface-mesh", surface_mesh, "Bias half the origins towards this mesh");
  gen_rays->add_flag("--normalize", normalize, "Normalise the surface mesh to [-0.9, 0.9]^3");
  gen_rays->add_option("--pairs", pair_count, "Number of symmetry pairs");
  gen_rays->add_option("--plane", plane, "Symmetry plane: point xyz then normal xyz")->expected(6);
  gen_rays->add_option("--pairs-out", pairs_out, "Output DDFR for pairs");

  // gen-gt
  auto* gen_gt = app.add_subcommand("gen-gt", "Cast rays against a mesh");
  std::string mesh_path, rays_path;
  int threads = 1;
  gen_gt->add_option("--mesh", mesh_path)->required();
  gen_gt->add_option("--rays", rays_path)->required();
  gen_gt->add_option("--out", out_path)->required();
  gen_gt->add_flag("--normalize", normalize);
  gen_gt->add_option("--threads", threads)->check(CLI::PositiveNumber);

  // make-pyramid
  auto* make_pyr = app.add_subcommand("make-pyramid", "Synthesise a feature pyramid for a mesh");
  std::string camera_path;
  SyntheticPyramidOptions pyr_opts;
  make_pyr->add_option("--mesh", mesh_path)->required();
  make_pyr->add_option("--out", out_path)->required();
  make_pyr->add_flag("--normalize", normalize);
  make_pyr->add_option("--camera", camera_path, "Camera JSON");
  make_pyr->add_option("--height", pyr_opts.height)->check(CLI::PositiveNumber);
  make_pyr->add_option("--width", pyr_opts.width)->check(CLI::PositiveNumber);
  make_pyr->add_option("--levels", pyr_opts.levels)->check(CLI::PositiveNumber);
  make_pyr->add_option("--noise", pyr_opts.noise_amplitude);
  make_pyr->add_option("--seed", seed);

  // fit
  auto* fit = app.add_subcommand("fit", "Train a network from a JSON run config");
  std::string config_path, log_path;
  fit->add_option("--config", config_path)->required();
  fit->add_option("--out", out_path, "Checkpoint (DDFN)")->required();
  fit->add_option("--log", log_path, "Per-epoch loss log (JSON)");

  // eval
  auto* eval = app.add_subcommand("eval", "Compute CD / F-5 / F-10");
  std::string pred_path, gt_path, checkpoint_path;
  double sphere = 0.0, mm_per_unit = 0.0, vis_threshold = kDefaultVisibilityThreshold;
  std::size_t eval_rays = 10000;
  eval->add_option("--pred", pred_path, "Predicted cloud (PLY)");
  eval->add_option("--gt", gt_path, "Reference cloud (PLY)");
  eval->add_option("--checkpoint", checkpoint_path, "Trained network; evaluated on random rays");
  eval->add_option("--mesh", mesh_path, "Ground-truth mesh for --checkpoint");
  eval->add_flag("--normalize", normalize);
  eval->add_option("--sphere", sphere, "Ground-truth unit-centred sphere radius for --checkpoint");
  eval->add_option("--rays", eval_rays)->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed);
  eval->add_option("--mm-per-unit", mm_per_unit, "Scale of wrist-frame units in mm");
  eval->add_option("--vis-threshold", vis_threshold);
  eval->add_option("--out", out_path, "Metrics JSON (stdout when absent)");

  // convert
  auto* convert = app.add_subcommand("convert", "Export a field as a PLY cloud or OBJ mesh");
  std::string to = "ply";
  MeshExtractionOptions mx;
  convert->add_option("--checkpoint", checkpoint_path);
  convert->add_option("--mesh", mesh_path, "Ground-truth field from a mesh");
  convert->add_flag("--normalize", normalize);
  convert->add_option("--sphere", sphere, "Ground-truth field of a centred sphere");
  convert->add_option("--to", to)->check(CLI::IsMember({"ply", "obj"}));
  convert->add_option("--out", out_path)->required();
  convert->add_option("--rays", eval_rays)->check(CLI::PositiveNumber);
  convert->add_option("--seed", seed);
  convert->add_option("--resolution", mx.grid_resolution);
  convert->add_option("--directions", mx.directions_per_point);
  convert->add_option("--iso", mx.iso);
  convert->add_option("--vis-threshold", vis_threshold);

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  int samples = 8;
  double step = 1e-4;
  gradcheck->add_option("--seed", seed);
  gradcheck->add_option("--samples", samples)->check(CLI::PositiveNumber);
  gradcheck->add_option("--step", step, "Finite-difference step")->check(CLI::PositiveNumber);
  gradcheck->add_option("--out", out_path, "Report JSON");

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*gen_rays) {
      const BoundingVolume box = bounds_from(bmin, bmax);
      const std::uint64_t s = effective_seed(seed);
      std::vector<Ray> rays;
      if (!surface_mesh.empty()) {
        rays = sample_rays_surface_biased(io::load_obj(surface_mesh, normalize).mesh, box, ray_count, s);
      } else {
        rays = sample_rays_uniform(box, ray_count, s);
      }
      io::RayDataset data;
      for (const auto& r : rays) data.samples.push_back({r, std::nullopt});
      io::save_ray_dataset(out_path, data);
      out << "wrote " << rays.size() << " rays to " << out_path << '\n';
      if (pair_count > 0) {
        if (pairs_out.empty()) throw UsageError("--pairs needs --pairs-out");
        Plane p;
        if (!plane.empty()) {
          p.point = Vec3(plane[0], plane[1], plane[2]);
          p.normal = Vec3(plane[3], plane[4], plane[5]);
          if (p.normal.norm() == 0.0) throw UsageError("plane normal must be non-zero");
          p.normal.normalize();
        }
        const auto pairs = make_symmetry_pairs(p, box, pair_count, s);
        io::save_ray_dataset(pairs_out, io::pairs_to_dataset(pairs));
        out << "wrote " << pairs.size() << " pairs to " << pairs_out << '\n';
      }
    } else if (*gen_gt) {
      const auto obj = io::load_obj(mesh_path, normalize);
      if (normalize) out << "normalised mesh with scale " << std::setprecision(17) << obj.scale << '\n';
      auto data = io::load_ray_dataset(rays_path);
      std::vector<Ray> rays;
      for (const auto& s : data.samples) rays.push_back(s.ray);
      data.samples = generate_ground_truth(obj.mesh, rays, static_cast<unsigned>(threads));
      data.has_ground_truth = true;
      io::save_ray_dataset(out_path, data);
      std::size_t visible = 0;
      for (const auto& s : data.samples) visible += s.visible();
      out << "wrote " << data.samples.size() << " samples (" << visible << " visible) to " << out_path << '\n';
    } else if (*make_pyr) {
      const auto obj = io::load_obj(mesh_path, normalize);
      const CameraPose cam = camera_path.empty() ? nn::default_camera(pyr_opts.height, pyr_opts.width)
                                                 : io::parse_camera_json(read_text(camera_path));
      pyr_opts.seed = effective_seed(seed);
      const auto pyramid = make_synthetic_pyramid(obj.mesh, cam, pyr_opts);
      io::save_pyramid(out_path, pyramid);
      out << "wrote " << pyramid.levels.size() << "-level pyramid (" << pyramid.total_channels()
          << " channels) to " << out_path << '\n';
    } else if (*fit) {
      io::RunConfig cfg = io::load_run_config(config_path);
      if (const auto s = seed_override()) cfg.seed = *s;
      const auto ctx = context_from(cfg);
      const auto data = io::load_ray_dataset(cfg.rays);
      if (!data.has_ground_truth) throw std::runtime_error(cfg.rays + ": no ground truth (run gen-gt)");
      const auto samples = nn::make_training_samples(ctx, data.samples);
      std::vector<nn::PairInput> pairs;
      if (cfg.pairs) pairs = nn::make_pair_inputs(ctx, io::dataset_to_pairs(io::load_ray_dataset(*cfg.pairs)));
      const nn::NetworkConfig net = cfg.network(ctx.pyramid.total_channels(),
                                                static_cast<int>(ctx.skeleton.joint_count()));
      nn::DdfModel model = nn::DdfModel::initialize(net, cfg.seed);
      ordered_json log = ordered_json::array();
      nn::train(model, samples, pairs, cfg.training(), [&](const nn::EpochLog& e) {
        log.push_back({{"epoch", e.epoch}, {"l_depth", e.l_depth}, {"l_vis", e.l_vis},
                       {"l_sym", e.l_sym}, {"total", e.total}});
        out << "epoch " << e.epoch << " total " << e.total << '\n';
      });
      io::save_checkpoint(out_path, model, io::checkpoint_echo_json(cfg, net));
      if (!log_path.empty()) write_text(log_path, ordered_json{{"epochs", log}}.dump(2) + "\n");
      out << "wrote " << out_path << '\n';
    } else if (*eval) {
      PointCloud pred, ref;
      if (!checkpoint_path.empty()) {
        const auto ck = io::load_checkpoint(checkpoint_path);
        const auto ctx = context_from(io::run_config_from_echo(ck.config_json));
        const auto truth = truth_field(mesh_path, normalize, sphere);
        const auto rays = sample_rays_uniform(BoundingVolume{}, eval_rays,
                                              effective_seed(seed) ^ 0x9E3779B97F4A7C15ull);
        NetworkField field(ck.model, ctx);
        pred = ddf_to_pointcloud(field, rays, vis_threshold);
        ref = ddf_to_pointcloud(*truth, rays);
      } else {
        if (pred_path.empty() || gt_path.empty()) {
          throw UsageError("eval needs --pred and --gt, or --checkpoint with --mesh/--sphere");
        }
        pred = io::load_ply(pred_path);
        ref = io::load_ply(gt_path);
      }
      if (mm_per_unit > 0.0) pred.mm_per_unit = ref.mm_per_unit = mm_per_unit;
      if (pred.empty()) throw std::runtime_error("predicted cloud is empty");
      emit(out_path, metrics_json(evaluate_clouds(pred, ref)).dump(2), out);
    } else if (*convert) {
      std::unique_ptr<FieldEvaluator> field;
      std::optional<io::Checkpoint> ck;
      std::optional<nn::FeatureContext> ctx;
      if (!checkpoint_path.empty()) {
        ck = io::load_checkpoint(checkpoint_path);
        ctx = context_from(io::run_config_from_echo(ck->config_json));
        field = std::make_unique<NetworkField>(ck->model, *ctx);
      } else {
        field = truth_field(mesh_path, normalize, sphere);
      }
      if (to == "ply") {
        const auto rays = sample_rays_uniform(BoundingVolume{}, eval_rays, effective_seed(seed));
        const auto cloud = ddf_to_pointcloud(*field, rays, vis_threshold);
        io::save_ply(out_path, cloud);
        out << "wrote " << cloud.size() << " points to " << out_path << '\n';
      } else {
        mx.vis_threshold = vis_threshold;
        const auto mesh = ddf_to_mesh(*field, BoundingVolume{}, mx);
        io::save_obj(out_path, mesh);
        out << "wrote " << mesh.faces.size() << " faces to " << out_path << '\n';
      }
    } else if (*gradcheck) {
      const auto r = nn::default_gradient_check(effective_seed(seed), samples, step);
      ordered_json j;
      j["max_relative_error"] = r.max_relative_error;
      j["worst_parameter"] = r.worst_parameter;
      j["worst_index"] = r.worst_index;
      j["checked"] = r.checked;
      j["skipped_at_kink"] = r.skipped_at_kink;
      j["passed"] = r.max_relative_error <= 1e-3;
      ordered_json per = ordered_json::object();
      for (const auto& p : r.per_parameter) per[p.name] = p.max_relative_error;
      j["per_parameter"] = per;
      emit(out_path, j.dump(2), out);
      if (!out_path.empty()) out << "max relative error " << r.max_relative_error << '\n';
      if (r.max_relative_error > 1e-3) {
        err << "gradient check failed: " << r.max_relative_error << " > 1e-3\n";
        return kExitData;
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ddf::cli
