#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "uavnav/train/config.h"
#include "uavnav/train/replay_buffer.h"
#include "uavnav/train/rollout.h"
#include "uavnav/train/sac.h"

namespace uavnav::train {

inline constexpr const char* kMetricsHeader =
    "episode,total_env_steps,mean_episode_reward,critic_loss,actor_loss,ae_loss,alpha";

struct EpisodeLog {
  int episode = 0;  // 1-based
  std::uint64_t total_env_steps = 0;
  double mean_reward = 0.0;
  // Means over the updates run after this episode; NaN when none ran.
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double ae_loss = 0.0;
  double alpha = 0.0;
};

std::string format_metrics_row(const EpisodeLog& log);

// Files inside an output directory.
namespace output_files {
inline constexpr const char* kConfigEcho = "config.ini";
inline constexpr const char* kMetrics = "metrics.csv";
inline constexpr const char* kCheckpoints = "checkpoints";
inline constexpr const char* kFinal = "final";
inline constexpr const char* kProgress = "progress.ini";
inline constexpr const char* kNanDump = "nan_dump.txt";
}  // namespace output_files

struct TrainResult {
  int episodes_run = 0;
  std::uint64_t total_env_steps = 0;
  std::filesystem::path final_checkpoint;
};

// Collect-then-update loop: each episode runs a fresh random scenario with
// every UAV acting on the shared policy, stores all transitions in one
// buffer, then performs update_times scheduled iterations once the buffer
// holds at least max(warmup_transitions, batch_size) transitions. The first
// warmup_transitions actions are drawn uniformly.
class Trainer {
 public:
  Trainer(TrainConfig config, std::filesystem::path output_dir);

  // Restores networks, optimizer state and counters from a checkpoint
  // directory. The replay buffer is not part of a checkpoint and refills.
  void resume_from(const std::filesystem::path& checkpoint_dir);

  TrainResult run(const std::function<void(const EpisodeLog&)>& on_episode = {});

  const TrainConfig& config() const { return config_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  SacAgent& agent() { return agent_; }

  // Writes a checkpoint (networks, optimizer, counters, config echo).
  void save_checkpoint(const std::filesystem::path& dir) const;

 private:
  TrainConfig config_;
  std::filesystem::path output_dir_;
  SacAgent agent_;
  ReplayBuffer buffer_;
  int next_episode_ = 0;  // 0-based
  std::uint64_t total_env_steps_ = 0;
  std::uint64_t actions_taken_ = 0;
};

// Loads the TrainConfig echoed into a checkpoint or output directory.
TrainConfig load_config_echo(const std::filesystem::path& dir);

// Networks built from a checkpoint's config echo and loaded from its files.
std::unique_ptr<nets::SacNetworks> load_networks(const std::filesystem::path& checkpoint_dir);

}  // namespace uavnav::train
