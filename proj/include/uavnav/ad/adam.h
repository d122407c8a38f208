#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavnav/ad/tensor.h"

namespace uavnav::ad {

struct AdamOptions {
  float learning_rate = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;
};

struct AdamMoments {
  std::vector<float> first;
  std::vector<float> second;
};

struct AdamState {
  std::vector<AdamMoments> moments;  // one per parameter tensor, same order
  std::int64_t step_count = 0;
};

// One bias-corrected Adam update of `param` in place. `step` is the 1-based
// index of this update.
void adam_step(std::span<float> param, std::span<const float> grad, AdamMoments& moments, std::int64_t step,
               const AdamOptions& options);

// Adam over a fixed list of parameter tensors. Parameters that received no
// gradient are treated as having a zero gradient.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  void zero_grad();
  void step();

  const std::vector<Tensor>& params() const { return params_; }
  const AdamOptions& options() const { return options_; }
  const AdamState& state() const { return state_; }
  AdamState& mutable_state() { return state_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  AdamState state_;
};

}  // namespace uavnav::ad
