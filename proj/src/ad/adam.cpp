#include "uavnav/ad/adam.h"

#include <cmath>

#include "uavnav/common/errors.h"

namespace uavnav::ad {

void adam_step(std::span<float> param, std::span<const float> grad, AdamMoments& moments, std::int64_t step,
               const AdamOptions& options) {
  if (step < 1) throw ContractViolation("adam_step: step must be >= 1");
  const std::size_t n = param.size();
  if (moments.first.empty()) moments.first.assign(n, 0.0f);
  if (moments.second.empty()) moments.second.assign(n, 0.0f);
  if (moments.first.size() != n || moments.second.size() != n || (!grad.empty() && grad.size() != n)) {
    throw ContractViolation("adam_step: parameter, gradient and moment sizes differ");
  }
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const float correction1 = static_cast<float>(1.0 - std::pow(b1, static_cast<double>(step)));
  const float correction2 = static_cast<float>(1.0 - std::pow(b2, static_cast<double>(step)));
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad.empty() ? 0.0f : grad[i];
    float& m = moments.first[i];
    float& v = moments.second[i];
    m = options.beta1 * m + (1.0f - options.beta1) * g;
    v = options.beta2 * v + (1.0f - options.beta2) * g * g;
    const float m_hat = m / correction1;
    const float v_hat = v / correction2;
    param[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  }
}

Adam::Adam(std::vector<Tensor> params, AdamOptions options) : params_(std::move(params)), options_(options) {
  if (!(options_.learning_rate > 0.0f)) throw ContractViolation("Adam: learning rate must be > 0");
  state_.moments.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].requires_grad()) throw ContractViolation("Adam: parameter does not require grad");
    state_.moments[i].first.assign(params_[i].numel(), 0.0f);
    state_.moments[i].second.assign(params_[i].numel(), 0.0f);
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

void Adam::step() {
  ++state_.step_count;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (const float g : params_[i].grad()) {
      if (!std::isfinite(g)) throw NumericalError("Adam: non-finite gradient");
    }
    adam_step(params_[i].mutable_values(), params_[i].grad(), state_.moments[i], state_.step_count, options_);
  }
}

}  // namespace uavnav::ad
