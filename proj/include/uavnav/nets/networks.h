#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "uavnav/common/random.h"
#include "uavnav/nets/layers.h"
#include "uavnav/obs/observation.h"
#include "uavnav/sim/world.h"

namespace uavnav::nets {

struct NetConfig {
  int image_height = 64;
  int image_width = 64;
  int frames = obs::kStackDepth;
  int filters = 32;
  int latent_dim = 50;
  int hidden = 256;
  float log_std_min = -10.0f;
  float log_std_max = 2.0f;

  static constexpr int kStateDim = 6;  // body-frame goal (3) + commanded velocity (3)
  static constexpr int kActionDim = 3;

  void validate() const;
  // Spatial side of the last encoder conv layer.
  std::size_t conv_out_height() const;
  std::size_t conv_out_width() const;
  std::size_t policy_input_dim() const { return static_cast<std::size_t>(latent_dim) + kStateDim; }
  std::size_t critic_input_dim() const { return policy_input_dim() + kActionDim; }
};

// Four 3x3 conv layers (first stride 2, rest stride 1, ReLU after each), a
// dense projection to the latent, layer norm, then tanh.
class Encoder {
 public:
  Encoder() = default;
  Encoder(const NetConfig& config, Rng& rng);

  // stack [N x frames x H x W] -> latent [N x latent_dim], entries in (-1, 1).
  Tensor forward(const Tensor& stack) const;
  ParamList parameters() const;
  Encoder clone() const;

 private:
  std::vector<ConvLayer> convs_;
  DenseLayer projection_;
  Tensor ln_gain_;
  Tensor ln_shift_;
  std::size_t conv_h_ = 0, conv_w_ = 0;
};

// Mirror of the encoder: dense from the latent, three stride-1 transposed
// convs with ReLU, then a stride-2 transposed conv back to the input size.
class Decoder {
 public:
  Decoder() = default;
  Decoder(const NetConfig& config, Rng& rng);

  // latent [N x latent_dim] -> reconstruction [N x frames x H x W].
  Tensor forward(const Tensor& latent) const;
  ParamList parameters() const;
  // Weight tensors only (dense matrices and kernels), for the weight penalty.
  std::vector<Tensor> weights() const;
  Decoder clone() const;

 private:
  DenseLayer projection_;
  std::vector<ConvLayer> deconvs_;  // applied transposed
  std::size_t filters_ = 0, conv_h_ = 0, conv_w_ = 0, output_padding_ = 0;
};

struct PolicyHead {
  Tensor mean;     // [N x 3]
  Tensor log_std;  // [N x 3], within [log_std_min, log_std_max]
};

class Actor {
 public:
  Actor() = default;
  Actor(const NetConfig& config, Rng& rng);

  // input = latent ++ state, [N x (latent_dim + 6)].
  PolicyHead forward(const Tensor& input) const;
  ParamList parameters() const;
  Actor clone() const;

 private:
  Mlp mlp_;
  float log_std_min_ = -10.0f;
  float log_std_max_ = 2.0f;
};

// Twin Q heads with independent parameters.
class Critic {
 public:
  Critic() = default;
  Critic(const NetConfig& config, Rng& rng);

  // input = latent ++ state ++ normalised action, [N x (latent_dim + 9)].
  std::pair<Tensor, Tensor> forward(const Tensor& input) const;
  ParamList parameters() const;
  Critic clone() const;
  const Mlp& q1() const { return q1_; }
  const Mlp& q2() const { return q2_; }

 private:
  Mlp q1_;
  Mlp q2_;
};

// Per-dimension affine map between the squashed range [-1, 1] and the
// command box [0, 2] x [-0.5, 0.5] x [-0.5, 0.5].
sim::VelocityCommand to_command(std::span<const float> squashed);
std::array<float, 3> to_normalized(const sim::VelocityCommand& cmd);

struct ActionSample {
  Tensor raw;       // pre-squash Gaussian sample [N x 3]
  Tensor squashed;  // tanh(raw) [N x 3]
  Tensor log_prob;  // [N x 1]
  PolicyHead head;
};

enum class ActMode { Sample, Mean };

// Observation batch in tensor form.
struct ObsTensors {
  Tensor stack;  // [N x frames x H x W]
  Tensor state;  // [N x 6]
};

ObsTensors to_tensors(std::span<const obs::Observation* const> observations);

// The full set of networks plus target copies of the encoder and both Q heads.
class SacNetworks {
 public:
  SacNetworks(const NetConfig& config, std::uint64_t seed);

  const NetConfig& config() const { return config_; }

  Tensor encode(const Tensor& stack) const { return encoder_.forward(stack); }
  Tensor encode_target(const Tensor& stack) const { return target_encoder_.forward(stack); }
  Tensor decode(const Tensor& latent) const { return decoder_.forward(latent); }

  // Reparameterised sample raw = mean + exp(log_std) * noise. With an
  // undefined `noise` tensor the mean is used (deterministic policy).
  ActionSample sample_action(const Tensor& latent, const Tensor& state, const Tensor& noise) const;
  std::pair<Tensor, Tensor> q_values(const Tensor& latent, const Tensor& state, const Tensor& action) const;
  std::pair<Tensor, Tensor> target_q_values(const Tensor& latent, const Tensor& state, const Tensor& action) const;

  // Single-observation policy evaluation; no graph is kept. The squashed
  // form is what the replay buffer stores; act() maps it to a command.
  std::array<float, 3> act_squashed(const obs::Observation& observation, ActMode mode, Rng& rng) const;
  sim::VelocityCommand act(const obs::Observation& observation, ActMode mode, Rng& rng) const;

  const Encoder& encoder() const { return encoder_; }
  const Decoder& decoder() const { return decoder_; }
  const Actor& actor() const { return actor_; }
  const Critic& critic() const { return critic_; }
  const Tensor& log_alpha() const { return log_alpha_; }
  float alpha() const;

  ParamList encoder_params() const { return encoder_.parameters(); }
  ParamList decoder_params() const { return decoder_.parameters(); }
  ParamList actor_params() const { return actor_.parameters(); }
  ParamList critic_params() const { return critic_.parameters(); }
  ParamList target_encoder_params() const { return target_encoder_.parameters(); }
  ParamList target_critic_params() const { return target_critic_.parameters(); }

  void soft_update_critic_target(double tau_q);
  void soft_update_encoder_target(double tau_enc);

  // One checkpoint file per network in `dir`.
  void save(const std::filesystem::path& dir) const;
  void load(const std::filesystem::path& dir);

 private:
  NetConfig config_;
  Encoder encoder_;
  Decoder decoder_;
  Actor actor_;
  Critic critic_;
  Encoder target_encoder_;
  Critic target_critic_;
  Tensor log_alpha_;
};

inline constexpr float kInitialAlpha = 0.1f;

// File names inside a checkpoint directory.
namespace checkpoint_files {
inline constexpr const char* kEncoder = "encoder.ckpt";
inline constexpr const char* kDecoder = "decoder.ckpt";
inline constexpr const char* kActor = "actor.ckpt";
inline constexpr const char* kCritic = "critic.ckpt";
inline constexpr const char* kTargetEncoder = "encoder_target.ckpt";
inline constexpr const char* kTargetCritic = "critic_target.ckpt";
inline constexpr const char* kTemperature = "temperature.ckpt";
}  // namespace checkpoint_files

}  // namespace uavnav::nets
