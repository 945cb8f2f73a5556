#include "ddf/nn/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ddf/nn/encoding.hpp"

namespace ddf::nn {
namespace {

using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd weight_of(const Linear& l) {
  return Eigen::Map<const RowMajorF>(l.weight.data.data(), l.out(), l.in()).cast<double>();
}

Eigen::VectorXd bias_of(const Linear& l) {
  return Eigen::Map<const Eigen::VectorXf>(l.bias.data.data(), l.out()).cast<double>();
}

Eigen::MatrixXd affine(const Linear& l, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y = weight_of(l) * x;
  y.colwise() += bias_of(l);
  return y;
}

void accumulate(const Eigen::MatrixXd& dz, const Eigen::MatrixXd& input, std::vector<double>& gw,
                std::vector<double>& gb) {
  Eigen::Map<RowMajorD> w(gw.data(), dz.rows(), input.rows());
  w.noalias() += dz * input.transpose();
  Eigen::Map<Eigen::VectorXd> b(gb.data(), dz.rows());
  b += dz.rowwise().sum();
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " is not finite");
  }
}

// Gradient slots in canonical parameter order.
enum Slot : int {
  kQueryW = 0, kQueryB, kKeyW, kKeyB, kValueW, kValueB, kOutW, kOutB, kLayer1W,
};
constexpr int layer_w(int layer) { return kLayer1W + 2 * (layer - 1); }
constexpr int kVisW = layer_w(kHiddenLayers + 1);
constexpr int kDistW = kVisW + 2;

}  // namespace

double Prediction::visibility() const { return sigmoid(visibility_logit); }

void ForwardPass::run(const DdfModel& model, std::span<const RayInput* const> inputs) {
  const NetworkConfig& cfg = model.config;
  const int c = cfg.feature_channels;
  const int b = static_cast<int>(inputs.size());
  if (b == 0) throw std::invalid_argument("empty batch");
  batch_ = b;

  key_offset_.assign(b, 0);
  key_count_.assign(b, 0);
  keys_ = 0;
  for (int i = 0; i < b; ++i) {
    const RayInput& in = *inputs[i];
    if (static_cast<int>(in.image.query.size()) != c) {
      throw std::invalid_argument("query feature has " + std::to_string(in.image.query.size()) +
                                  " channels, network expects " + std::to_string(c));
    }
    if (static_cast<int>(in.hand_global.size()) != cfg.global_dim()) {
      throw std::invalid_argument("global hand embedding has wrong length");
    }
    if (static_cast<int>(in.hand_local.size()) != cfg.local_dim()) {
      throw std::invalid_argument("local hand feature has wrong length");
    }
    key_offset_[i] = keys_;
    key_count_[i] = static_cast<int>(in.image.along_ray.size());
    keys_ += key_count_[i];
  }

  // Attention.
  fp_.resize(c, b);
  fl_.resize(c, keys_);
  for (int i = 0; i < b; ++i) {
    const RayInput& in = *inputs[i];
    require_finite(in.image.query, "query feature");
    fp_.col(i) = Eigen::Map<const Eigen::VectorXd>(in.image.query.data(), c);
    for (int j = 0; j < key_count_[i]; ++j) {
      const auto& f = in.image.along_ray[j];
      if (static_cast<int>(f.size()) != c) throw std::invalid_argument("key feature size mismatch");
      require_finite(f, "key feature");
      fl_.col(key_offset_[i] + j) = Eigen::Map<const Eigen::VectorXd>(f.data(), c);
    }
  }
  const AttentionBlock& att = model.attention;
  const int heads = att.heads;
  const int dh = c / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  q_ = affine(att.query, fp_);
  k_ = affine(att.key, fl_);
  v_ = affine(att.value, fl_);
  attn_.setZero(heads, keys_);
  o_.setZero(c, b);
  for (int i = 0; i < b; ++i) {
    const int n = key_count_[i];
    if (n == 0) continue;
    const int off = key_offset_[i];
    for (int h = 0; h < heads; ++h) {
      const auto qh = q_.block(h * dh, i, dh, 1);
      Eigen::RowVectorXd s = (qh.transpose() * k_.block(h * dh, off, dh, n)) * scale;
      s = (s.array() - s.maxCoeff()).exp();
      s /= s.sum();
      attn_.block(h, off, 1, n) = s;
      o_.block(h * dh, i, dh, 1) = v_.block(h * dh, off, dh, n) * s.transpose();
    }
  }
  Eigen::MatrixXd f2d = fp_;
  const Eigen::MatrixXd projected = affine(att.output, o_);
  for (int i = 0; i < b; ++i) {
    if (key_count_[i] > 0) f2d.col(i) += projected.col(i);
  }

  // Input assembly: [gamma(P); gamma(theta); F_2D; F_G; F_L].
  const int skip = cfg.skip_dim();
  const int in_dim = cfg.input_dim();
  Eigen::MatrixXd x0(in_dim, b);
  for (int i = 0; i < b; ++i) {
    const RayInput& in = *inputs[i];
    const double o[3] = {in.ray.origin.x(), in.ray.origin.y(), in.ray.origin.z()};
    const double d[3] = {in.ray.direction.x(), in.ray.direction.y(), in.ray.direction.z()};
    require_finite(o, "ray origin");
    require_finite(d, "ray direction");
    double* col = x0.col(i).data();
    positional_encode_into(o, cfg.pe_bands_origin, {col, std::size_t(cfg.origin_encoding_dim())});
    positional_encode_into(d, cfg.pe_bands_dir,
                           {col + cfg.origin_encoding_dim(), std::size_t(cfg.direction_encoding_dim())});
    require_finite(in.hand_global, "global hand embedding");
    require_finite(in.hand_local, "local hand feature");
    std::copy(in.hand_global.begin(), in.hand_global.end(), col + skip + c);
    std::copy(in.hand_local.begin(), in.hand_local.end(), col + skip + c + cfg.global_dim());
  }
  x0.middleRows(skip, c) = f2d;

  // MLP trunk.
  layer_in_.resize(kHiddenLayers);
  pre_.resize(kHiddenLayers);
  post_.resize(kHiddenLayers);
  for (int layer = 1; layer <= kHiddenLayers; ++layer) {
    const int idx = layer - 1;
    if (layer == 1) {
      layer_in_[idx] = x0;
    } else if (layer == kSkipLayer) {
      layer_in_[idx].resize(cfg.width + skip, b);
      layer_in_[idx].topRows(cfg.width) = post_[idx - 1];
      layer_in_[idx].bottomRows(skip) = x0.topRows(skip);
    } else {
      layer_in_[idx] = post_[idx - 1];
    }
    pre_[idx] = affine(model.network.layers[idx], layer_in_[idx]);
    post_[idx] = pre_[idx].cwiseMax(0.0);
  }
  logit_ = affine(model.network.visibility_head, post_[kVisibilityLayer - 1]).row(0);
  dist_pre_ = affine(model.network.distance_head, post_[kHiddenLayers - 1]).row(0);
  depth_ = dist_pre_.unaryExpr([](double x) { return softplus(x); });
}

void ForwardPass::backward(const DdfModel& model, std::span<const double> d_logit,
                           std::span<const double> d_depth, Gradients& g) const {
  if (static_cast<int>(d_logit.size()) != batch_ || static_cast<int>(d_depth.size()) != batch_) {
    throw std::invalid_argument("gradient seed length does not match the batch");
  }
  const NetworkConfig& cfg = model.config;
  const int c = cfg.feature_channels;
  const int skip = cfg.skip_dim();
  const Eigen::Map<const Eigen::RowVectorXd> dl(d_logit.data(), batch_);
  const Eigen::Map<const Eigen::RowVectorXd> dd(d_depth.data(), batch_);

  // Distance head: depth = softplus(pre), softplus' = sigmoid.
  const Eigen::RowVectorXd d_pre =
      dd.cwiseProduct(dist_pre_.unaryExpr([](double x) { return sigmoid(x); }));
  accumulate(d_pre, post_[kHiddenLayers - 1], g[kDistW], g[kDistW + 1]);
  Eigen::MatrixXd d_post = weight_of(model.network.distance_head).transpose() * d_pre;

  Eigen::MatrixXd d_x0;
  for (int layer = kHiddenLayers; layer >= 1; --layer) {
    const int idx = layer - 1;
    const Eigen::MatrixXd dz =
        d_post.cwiseProduct((pre_[idx].array() > 0.0).cast<double>().matrix());
    accumulate(dz, layer_in_[idx], g[layer_w(layer)], g[layer_w(layer) + 1]);
    Eigen::MatrixXd d_in = weight_of(model.network.layers[idx]).transpose() * dz;
    if (layer == 1) {
      d_x0 = std::move(d_in);
      break;
    }
    if (layer == kSkipLayer) {
      d_post = d_in.topRows(cfg.width);
    } else {
      d_post = std::move(d_in);
    }
    if (layer - 1 == kVisibilityLayer) {
      accumulate(dl, post_[kVisibilityLayer - 1], g[kVisW], g[kVisW + 1]);
      d_post += weight_of(model.network.visibility_head).transpose() * dl;
    }
  }

  // Attention: F_2D = F_p + (W_o O + b_o) on rays with keys.
  Eigen::MatrixXd d_f2d = d_x0.middleRows(skip, c);
  for (int i = 0; i < batch_; ++i) {
    if (key_count_[i] == 0) d_f2d.col(i).setZero();
  }
  accumulate(d_f2d, o_, g[kOutW], g[kOutB]);
  const Eigen::MatrixXd d_o = weight_of(model.attention.output).transpose() * d_f2d;

  const int heads = model.attention.heads;
  const int dh = c / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Eigen::MatrixXd d_q = Eigen::MatrixXd::Zero(c, batch_);
  Eigen::MatrixXd d_k = Eigen::MatrixXd::Zero(c, keys_);
  Eigen::MatrixXd d_v = Eigen::MatrixXd::Zero(c, keys_);
  for (int i = 0; i < batch_; ++i) {
    const int n = key_count_[i];
    if (n == 0) continue;
    const int off = key_offset_[i];
    for (int h = 0; h < heads; ++h) {
      const Eigen::RowVectorXd a = attn_.block(h, off, 1, n);
      const auto doh = d_o.block(h * dh, i, dh, 1);
      const auto vh = v_.block(h * dh, off, dh, n);
      const auto kh = k_.block(h * dh, off, dh, n);
      d_v.block(h * dh, off, dh, n) += doh * a;
      const Eigen::RowVectorXd da = doh.transpose() * vh;
      const double mean = a.dot(da);
      const Eigen::RowVectorXd ds = a.cwiseProduct((da.array() - mean).matrix()) * scale;
      d_q.block(h * dh, i, dh, 1) += kh * ds.transpose();
      d_k.block(h * dh, off, dh, n) += q_.block(h * dh, i, dh, 1) * ds;
    }
  }
  accumulate(d_q, fp_, g[kQueryW], g[kQueryB]);
  if (keys_ > 0) {
    accumulate(d_k, fl_, g[kKeyW], g[kKeyB]);
    accumulate(d_v, fl_, g[kValueW], g[kValueB]);
  }
}

std::vector<bool> ForwardPass::relu_pattern() const {
  std::vector<bool> out;
  for (const auto& z : pre_) {
    for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(z.data()[i] > 0.0);
  }
  return out;
}

std::vector<Prediction> predict(const DdfModel& model, std::span<const RayInput* const> inputs) {
  ForwardPass pass;
  pass.run(model, inputs);
  std::vector<Prediction> out(inputs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pass.prediction(i);
  return out;
}

Prediction predict(const DdfModel& model, const RayInput& input) {
  const RayInput* ptr = &input;
  return predict(model, std::span<const RayInput* const>(&ptr, 1)).front();
}

Prediction forward_features(const DdfModel& model, const Ray& ray, std::span<const double> f_2d,
                            std::span<const double> f_global, std::span<const double> f_local) {
  // With no along-ray keys the attention block passes F_p through, so
  // feeding F_2D as the query evaluates the MLP on it directly.
  RayInput in;
  in.ray = ray;
  in.image.query.assign(f_2d.begin(), f_2d.end());
  in.image.degenerate = true;
  in.hand_global.assign(f_global.begin(), f_global.end());
  in.hand_local.assign(f_local.begin(), f_local.end());
  return predict(model, in);
}

}  // namespace ddf::nn
