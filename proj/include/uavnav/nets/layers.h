#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uavnav/ad/checkpoint.h"
#include "uavnav/ad/tensor.h"
#include "uavnav/common/random.h"

namespace uavnav::nets {

using ad::NamedTensor;
using ad::Tensor;
using ParamList = std::vector<NamedTensor>;

// Weight matrix [in x out] with orthonormal rows/columns (QR of a Gaussian
// matrix), zero bias.
struct DenseLayer {
  Tensor weight;
  Tensor bias;

  static DenseLayer orthogonal(std::size_t in, std::size_t out, Rng& rng, float gain = 1.0f);
  Tensor forward(const Tensor& x) const;
  void append_params(const std::string& prefix, ParamList& out) const;
  DenseLayer clone() const;
};

// 3x3 kernels [F x C x 3 x 3] and bias [F], both drawn from
// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in = C * 9.
struct ConvLayer {
  Tensor kernels;
  Tensor bias;
  std::size_t stride = 1;

  static ConvLayer fan_in_uniform(std::size_t in_channels, std::size_t filters, std::size_t stride, Rng& rng);
  // Layer meant for forward_transposed: kernels [in x out x 3 x 3], bias [out],
  // bound 1/sqrt(in * 9).
  static ConvLayer transposed_fan_in_uniform(std::size_t in_channels, std::size_t out_channels, std::size_t stride,
                                             Rng& rng);
  Tensor forward(const Tensor& x) const;
  // Transposed application of the same kernel tensor; the bias then has one
  // entry per kernel input channel.
  Tensor forward_transposed(const Tensor& x, std::size_t output_padding) const;
  void append_params(const std::string& prefix, ParamList& out) const;
  ConvLayer clone() const;
};

// Three dense layers with ReLU between them and a linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng);

  Tensor forward(const Tensor& x) const;
  void append_params(const std::string& prefix, ParamList& out) const;
  Mlp clone() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
};

// target <- (1 - tau) * target + tau * online, elementwise, evaluated in double
// and rounded once to float. Names and shapes must match pairwise.
void soft_update(const ParamList& target, const ParamList& online, double tau);

void copy_params(const ParamList& target, const ParamList& source);

}  // namespace uavnav::nets
