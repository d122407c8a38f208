#pragma once

#include <cstddef>
#include <vector>

#include "uavnav/ad/tensor.h"

namespace uavnav::ad {

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor minimum(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, float factor);
Tensor add_scalar(const Tensor& a, float offset);
// a * s where s holds a single element (broadcast).
Tensor mul_scalar(const Tensor& a, const Tensor& s);

Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);

// Reductions to a single-element tensor of shape [1].
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// [N x K] * [K x M].
Tensor matmul(const Tensor& a, const Tensor& b);
// Adds a per-feature bias: [N x D] + [D], or [N x C x H x W] + [C].
Tensor add_bias(const Tensor& x, const Tensor& bias);
// x [N x Din] * W [Din x Dout] + b [Dout].
Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias);

// Valid (unpadded) cross-correlation with 3x3 kernels.
// input [N x C x H x W], kernels [F x C x 3 x 3] -> [N x F x H' x W'],
// H' = (H - 3) / stride + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernels, std::size_t stride);

// Adjoint of conv2d for the same kernel tensor: input [N x F x H x W],
// kernels [F x C x 3 x 3] -> [N x C x H' x W'],
// H' = (H - 1) * stride + 3 + output_padding, output_padding < stride.
Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels, std::size_t stride,
                        std::size_t output_padding = 0);

inline constexpr float kLayerNormEps = 1e-5f;

// Row-wise normalisation of [N x D] (D >= 2) followed by gain/shift [D].
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, float eps = kLayerNormEps);

// Column concatenation of [N x Di] blocks.
Tensor concat_cols(const std::vector<Tensor>& parts);
// Columns [begin, end) of [N x D].
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& x, Shape shape);

inline constexpr double kLogProbSquashEps = 1e-6;

// Log density of a tanh-squashed diagonal Gaussian, evaluated at the
// pre-squash sample. raw, mean, log_std are [N x A]; result is [N x 1]:
//   sum_j log N(raw_j; mean_j, exp(log_std_j)) - sum_j log(1 - tanh(raw_j)^2 + 1e-6)
Tensor gaussian_logprob(const Tensor& raw, const Tensor& mean, const Tensor& log_std);

}  // namespace uavnav::ad
