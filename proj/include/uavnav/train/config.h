#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "uavnav/camera/depth_camera.h"
#include "uavnav/common/ini.h"
#include "uavnav/nets/networks.h"
#include "uavnav/obs/reward.h"
#include "uavnav/sim/scenario.h"

namespace uavnav::train {

// Simulation settings shared by training and evaluation rollouts.
struct EnvConfig {
  camera::CameraModel camera;
  obs::RewardParams reward;
  double dt = 0.1;
  int t_max = 500;

  void validate() const;
};

struct SacHyper {
  int batch_size = 128;
  double gamma = 0.99;
  float critic_lr = 1e-3f;
  float actor_lr = 1e-3f;
  float ae_lr = 1e-3f;
  float alpha_lr = 1e-3f;
  double tau_q = 0.01;
  double tau_enc = 0.05;
  int actor_update_freq = 2;
  int critic_target_update_freq = 2;
  double target_entropy = -3.0;
  double lambda_z = 1e-6;
  double lambda_theta = 1e-7;

  void validate() const;
};

struct TrainConfig {
  sim::ScenarioSpec scenario;  // seed is ignored; every episode derives its own
  EnvConfig env;
  nets::NetConfig net;
  SacHyper sac;
  int max_episodes = 200;
  int update_times = 400;
  int buffer_capacity = 20000;
  int warmup_transitions = 1000;
  int checkpoint_every = 50;  // episodes; 0 keeps only the final checkpoint
  std::uint64_t seed = 1;

  void validate() const;
  // Net input geometry follows the camera.
  nets::NetConfig resolved_net() const;
};

// Sectioned INI: [scenario] [camera] [net] [reward] [sac] [train]. Keys are
// addressed as "section.key" in overrides. Unknown keys throw ConfigError
// naming the key.
TrainConfig parse_train_config(std::string_view text);
void apply_train_key(TrainConfig& config, const IniEntry& entry);
// Round-trips through parse_train_config.
std::string format_train_config(const TrainConfig& config);

}  // namespace uavnav::train
