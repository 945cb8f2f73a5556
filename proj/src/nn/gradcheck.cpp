#include "ddf/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ddf/common/rng.hpp"

namespace ddf::nn {
namespace {

struct Evaluation {
  double loss = 0.0;
  std::vector<bool> pattern;
};

Evaluation evaluate(const DdfModel& model, const BatchView& batch, double lambda1, double lambda2) {
  const std::size_t n = batch.inputs.size();
  const std::size_t m = batch.pairs.size();
  std::vector<const RayInput*> all = batch.inputs;
  for (const auto& p : batch.pairs) all.push_back(p.first);
  for (const auto& p : batch.pairs) all.push_back(p.second);
  ForwardPass pass;
  pass.run(model, all);
  std::vector<Prediction> preds(n);
  for (std::size_t i = 0; i < n; ++i) preds[i] = pass.prediction(i);
  std::vector<std::pair<double, double>> pairs(m);
  for (std::size_t k = 0; k < m; ++k) {
    pairs[k] = {pass.prediction(n + k).depth, pass.prediction(n + m + k).depth};
  }
  Evaluation e;
  e.loss = compute_loss(preds, batch.targets, pairs, lambda1, lambda2).total;
  e.pattern = pass.relu_pattern();
  // Kinks of the loss itself: |D_hat - D| and |D_a - D_b|.
  for (std::size_t i = 0; i < n; ++i) {
    e.pattern.push_back(preds[i].depth > batch.targets[i].depth);
    const double p = preds[i].visibility();
    e.pattern.push_back(p > kBceClamp && p < 1.0 - kBceClamp);
  }
  for (const auto& [a, b] : pairs) e.pattern.push_back(a > b);
  return e;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

GradcheckReport gradient_check(DdfModel& model, const BatchView& batch, double lambda1,
                               double lambda2, double h) {
  Gradients analytic = zero_gradients(model);
  compute_gradients(model, batch, lambda1, lambda2, analytic);

  GradcheckReport report;
  auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    ParameterCheck pc{params[k].name, 0.0, 0};
    auto& data = params[k].tensor->data;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const float saved = data[i];
      bool done = false;
      double step = h;
      for (int attempt = 0; attempt < 3 && !done; ++attempt, step /= 10.0) {
        const float plus = static_cast<float>(saved + step);
        const float minus = static_cast<float>(saved - step);
        data[i] = plus;
        const Evaluation up = evaluate(model, batch, lambda1, lambda2);
        data[i] = minus;
        const Evaluation down = evaluate(model, batch, lambda1, lambda2);
        data[i] = saved;
        if (up.pattern != down.pattern) continue;
        const double numeric =
            (up.loss - down.loss) / (static_cast<double>(plus) - static_cast<double>(minus));
        const double err = relative_error(analytic[k][i], numeric);
        pc.max_relative_error = std::max(pc.max_relative_error, err);
        ++pc.checked;
        if (err > report.max_relative_error || report.checked == 0) {
          report.max_relative_error = std::max(report.max_relative_error, err);
          if (err >= report.max_relative_error) {
            report.worst_parameter = params[k].name;
            report.worst_index = i;
          }
        }
        ++report.checked;
        done = true;
      }
      if (!done) ++report.skipped_at_kink;
    }
    report.per_parameter.push_back(pc);
  }
  return report;
}

GradcheckReport default_gradient_check(std::uint64_t seed, int samples, double h) {
  NetworkConfig cfg;
  cfg.width = 16;
  cfg.feature_channels = 8;
  cfg.heads = 2;
  cfg.samples_along_ray = 4;
  cfg.k_3d = 8;
  cfg.joints = 21;
  DdfModel model = DdfModel::initialize(cfg, seed);
  // Non-zero biases so bias gradients are exercised away from the origin.
  Rng rng = make_rng(seed, RngStream::kGradcheck);
  for (auto& p : model.parameters()) {
    if (p.name.ends_with(".bias")) {
      for (auto& b : p.tensor->data) b = static_cast<float>(rng.uniform(-0.1, 0.1));
    }
  }

  auto random_input = [&](bool degenerate) {
    auto in = std::make_unique<RayInput>();
    in->ray.origin = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    in->ray.direction = rng.unit_vector();
    in->image.query.resize(cfg.feature_channels);
    for (auto& v : in->image.query) v = rng.uniform(-1, 1);
    in->image.degenerate = degenerate;
    if (!degenerate) {
      in->image.along_ray.assign(cfg.samples_along_ray, FeatureVector(cfg.feature_channels));
      for (auto& f : in->image.along_ray) {
        for (auto& v : f) v = rng.uniform(-1, 1);
      }
    }
    in->hand_global.resize(cfg.global_dim());
    for (auto& v : in->hand_global) v = rng.uniform(-1, 1);
    in->hand_local.resize(cfg.local_dim());
    for (auto& v : in->hand_local) v = rng.uniform(-1, 1);
    return in;
  };

  std::vector<std::unique_ptr<RayInput>> storage;
  BatchView batch;
  for (int i = 0; i < samples; ++i) {
    storage.push_back(random_input(i == samples - 1));
    batch.inputs.push_back(storage.back().get());
    const bool visible = (i % 3) != 2;
    batch.targets.push_back({visible, rng.uniform(0.0, 2.0), true});
  }
  for (int k = 0; k < 2; ++k) {
    storage.push_back(random_input(false));
    const RayInput* a = storage.back().get();
    storage.push_back(random_input(false));
    batch.pairs.push_back({a, storage.back().get()});
  }
  return gradient_check(model, batch, kDefaultLambda1, kDefaultLambda2, h);
}

}  // namespace ddf::nn
