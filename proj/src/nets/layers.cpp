#include "uavnav/nets/layers.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "uavnav/ad/ops.h"
#include "uavnav/common/errors.h"

namespace uavnav::nets {
namespace {

void check_pairing(const ParamList& target, const ParamList& source, const char* op) {
  if (target.size() != source.size()) throw ContractViolation(std::string(op) + ": parameter counts differ");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i].tensor.shape() != source[i].tensor.shape()) {
      throw ContractViolation(std::string(op) + ": shape mismatch for '" + target[i].name + "'");
    }
  }
}

}  // namespace

DenseLayer DenseLayer::orthogonal(std::size_t in, std::size_t out, Rng& rng, float gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t rows = std::max(in, out);
  const std::size_t cols = std::min(in, out);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  // Sign fix makes the factorisation unique (uniform over orthogonal matrices).
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  if (in < out) q.transposeInPlace();  // want [in x out]

  std::vector<float> w(in * out);
  for (std::size_t i = 0; i < in; ++i) {
    for (std::size_t j = 0; j < out; ++j) w[i * out + j] = static_cast<float>(gain * q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  return {Tensor::from_values({in, out}, std::move(w), true), Tensor::zeros({out}, true)};
}

Tensor DenseLayer::forward(const Tensor& x) const { return ad::dense(x, weight, bias); }

void DenseLayer::append_params(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

DenseLayer DenseLayer::clone() const { return {weight.clone(), bias.clone()}; }

ConvLayer ConvLayer::fan_in_uniform(std::size_t in_channels, std::size_t filters, std::size_t stride, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * 9));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  std::vector<float> k(filters * in_channels * 9);
  for (float& v : k) v = static_cast<float>(uniform(rng));
  std::vector<float> b(filters);
  for (float& v : b) v = static_cast<float>(uniform(rng));
  return {Tensor::from_values({filters, in_channels, 3, 3}, std::move(k), true),
          Tensor::from_values({filters}, std::move(b), true), stride};
}

ConvLayer ConvLayer::transposed_fan_in_uniform(std::size_t in_channels, std::size_t out_channels, std::size_t stride,
                                               Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * 9));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  std::vector<float> k(in_channels * out_channels * 9);
  for (float& v : k) v = static_cast<float>(uniform(rng));
  std::vector<float> b(out_channels);
  for (float& v : b) v = static_cast<float>(uniform(rng));
  return {Tensor::from_values({in_channels, out_channels, 3, 3}, std::move(k), true),
          Tensor::from_values({out_channels}, std::move(b), true), stride};
}

Tensor ConvLayer::forward(const Tensor& x) const { return ad::add_bias(ad::conv2d(x, kernels, stride), bias); }

Tensor ConvLayer::forward_transposed(const Tensor& x, std::size_t output_padding) const {
  return ad::add_bias(ad::conv2d_transpose(x, kernels, stride, output_padding), bias);
}

void ConvLayer::append_params(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".kernels", kernels});
  out.push_back({prefix + ".bias", bias});
}

ConvLayer ConvLayer::clone() const { return {kernels.clone(), bias.clone(), stride}; }

Mlp::Mlp(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng) {
  layers_.push_back(DenseLayer::orthogonal(in, hidden, rng));
  layers_.push_back(DenseLayer::orthogonal(hidden, hidden, rng));
  layers_.push_back(DenseLayer::orthogonal(hidden, out, rng));
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) h = ad::relu(h);
  }
  return h;
}

void Mlp::append_params(const std::string& prefix, ParamList& out) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].append_params(prefix + ".fc" + std::to_string(i), out);
}

Mlp Mlp::clone() const {
  Mlp copy;
  for (const DenseLayer& l : layers_) copy.layers_.push_back(l.clone());
  return copy;
}

void soft_update(const ParamList& target, const ParamList& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ContractViolation("soft_update: tau must lie in (0, 1]");
  check_pairing(target, online, "soft_update");
  for (std::size_t i = 0; i < target.size(); ++i) {
    Tensor t = target[i].tensor;
    const auto src = online[i].tensor.values();
    auto dst = t.mutable_values();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = static_cast<float>((1.0 - tau) * static_cast<double>(dst[k]) + tau * static_cast<double>(src[k]));
    }
  }
}

void copy_params(const ParamList& target, const ParamList& source) {
  check_pairing(target, source, "copy_params");
  for (std::size_t i = 0; i < target.size(); ++i) {
    Tensor t = target[i].tensor;
    const auto src = source[i].tensor.values();
    std::copy(src.begin(), src.end(), t.mutable_values().begin());
  }
}

}  // namespace uavnav::nets
