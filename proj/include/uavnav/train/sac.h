#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "uavnav/ad/adam.h"
#include "uavnav/common/random.h"
#include "uavnav/nets/networks.h"
#include "uavnav/train/config.h"
#include "uavnav/train/replay_buffer.h"

namespace uavnav::train {

using ad::Tensor;

// A sampled minibatch in tensor form.
struct Batch {
  Tensor obs;         // [N x 3 x H x W]
  Tensor state;       // [N x 6]
  Tensor action;      // [N x 3], squashed
  Tensor reward;      // [N x 1]
  Tensor next_obs;    // [N x 3 x H x W]
  Tensor next_state;  // [N x 6]
  Tensor not_done;    // [N x 1], 1 - done

  std::size_t size() const { return reward.dim(0); }
};

Batch make_batch(std::span<const Transition* const> transitions);

// Standard-normal [n x 3] tensor for reparameterised action samples.
Tensor gaussian_noise(std::size_t n, Rng& rng);

// Losses with their graphs attached (no optimizer step). Exposed so tests can
// recompute them independently.
//
// Critic: y = r + gamma * not_done * (min(Qt1, Qt2)(z't, a') - alpha * log pi(a'|z'))
// with a' drawn from the actor on the online latent z' of next_obs and the
// target heads evaluated on the target-encoder latent z't; y carries no
// gradient. Loss = mean((Q1 - y)^2) + mean((Q2 - y)^2).
Tensor critic_loss(const nets::SacNetworks& nets, const Batch& batch, const Tensor& next_noise, double gamma);
// Actor: mean(alpha * log pi(a~|z) - min(Q1, Q2)(z, a~)) on a detached latent.
struct ActorLoss {
  Tensor loss;
  Tensor log_prob;  // [N x 1], log pi(a~|z)
};
ActorLoss actor_loss(const nets::SacNetworks& nets, const Batch& batch, const Tensor& noise);
// Temperature: mean(alpha * (-log pi - target_entropy)) with the bracket
// detached; gradient flows only into log_alpha.
Tensor alpha_loss(const nets::SacNetworks& nets, const Tensor& log_prob, double target_entropy);
// Autoencoder: mean((decode(encode(o)) - o)^2) + lambda_z * mean_i |z_i|^2
// + lambda_theta * sum of squared decoder weights (biases excluded).
Tensor autoencoder_loss(const nets::SacNetworks& nets, const Batch& batch, double lambda_z, double lambda_theta);

struct ActorStep {
  float actor_loss = 0.0f;
  float alpha_loss = 0.0f;
  float entropy = 0.0f;  // -mean log pi
};

// Networks plus their optimizers. Critic Adam covers critic + encoder, actor
// Adam the actor only, AE Adam encoder + decoder, and one for log_alpha.
class SacAgent {
 public:
  SacAgent(const nets::NetConfig& net, const SacHyper& hyper, std::uint64_t seed);

  // One scheduled iteration: critic every time, actor + temperature and the
  // target soft updates on every actor_update_freq / critic_target_update_freq
  // iteration, autoencoder every time. Noise is drawn from `noise_rng`.
  struct IterationLosses {
    float critic = 0.0f;
    float autoencoder = 0.0f;
    bool actor_ran = false;
    float actor = 0.0f;
  };
  IterationLosses update(const Batch& batch, Rng& noise_rng);

  float critic_update(const Batch& batch, const Tensor& next_noise);
  ActorStep actor_update(const Batch& batch, const Tensor& noise);
  float autoencoder_update(const Batch& batch);
  void soft_update_targets();

  nets::SacNetworks& networks() { return *nets_; }
  const nets::SacNetworks& networks() const { return *nets_; }
  const SacHyper& hyper() const { return hyper_; }

  // Update-iteration counter used for the actor / target schedules.
  std::int64_t iterations() const { return iterations_; }
  void set_iterations(std::int64_t n) { iterations_ = n; }

  // Networks plus optimizer moments and counters.
  void save(const std::filesystem::path& dir) const;
  void load(const std::filesystem::path& dir);

 private:
  SacHyper hyper_;
  std::unique_ptr<nets::SacNetworks> nets_;
  std::unique_ptr<ad::Adam> critic_opt_;
  std::unique_ptr<ad::Adam> actor_opt_;
  std::unique_ptr<ad::Adam> ae_opt_;
  std::unique_ptr<ad::Adam> alpha_opt_;
  std::int64_t iterations_ = 0;

  void zero_all();
};

inline constexpr const char* kOptimizerFile = "optimizer.ckpt";

}  // namespace uavnav::train
