#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "uavnav/eval/metrics.h"
#include "uavnav/sim/scenario.h"
#include "uavnav/train/config.h"
#include "uavnav/train/rollout.h"

namespace uavnav::eval {

struct EvalOptions {
  sim::ScenarioSpec scenario;  // seed is replaced per episode
  train::EnvConfig env;
  int episodes = 10;
  std::uint64_t seed = 0;
  // When set, one trajectory CSV per episode plus results.jsonl land here.
  std::optional<std::filesystem::path> output_dir;
};

struct EvalOutcome {
  MetricsReport report;
  std::vector<EpisodeResult> episodes;
};

EpisodeResult summarize_episode(const train::EpisodeStats& stats, const sim::ScenarioSpec& spec, double dt);

// Runs `episodes` seeded episodes with `policy`. Episode m uses scenario seed
// derive_seed(seed, evaluation stream, m), so reruns are identical.
EvalOutcome run_evaluation(train::Policy& policy, const EvalOptions& options);

// Evaluation of a trained checkpoint with the deterministic mean action.
// Throws CheckpointError when the checkpoint cannot be loaded.
EvalOutcome run_evaluation(const std::filesystem::path& checkpoint_dir, const EvalOptions& options);

}  // namespace uavnav::eval
