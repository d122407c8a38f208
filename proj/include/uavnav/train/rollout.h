#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "uavnav/common/random.h"
#include "uavnav/nets/networks.h"
#include "uavnav/obs/observation.h"
#include "uavnav/sim/trajectory_log.h"
#include "uavnav/sim/world.h"
#include "uavnav/train/config.h"
#include "uavnav/train/replay_buffer.h"

namespace uavnav::train {

// Decentralized policy: every UAV maps its own observation to a squashed
// action in [-1, 1]^3, independent of the others.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::array<float, 3> act(const obs::Observation& observation, Rng& rng) = 0;
};

class UniformPolicy : public Policy {
 public:
  std::array<float, 3> act(const obs::Observation& observation, Rng& rng) override;
};

// Scripted baseline that turns in place until facing the goal, then flies
// the straight 3D segment to it.
class StraightLinePolicy : public Policy {
 public:
  explicit StraightLinePolicy(double dt, double heading_tolerance = 1e-6);
  std::array<float, 3> act(const obs::Observation& observation, Rng& rng) override;

 private:
  double dt_;
  double heading_tolerance_;
};

class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(const nets::SacNetworks& networks, nets::ActMode mode) : networks_(networks), mode_(mode) {}
  std::array<float, 3> act(const obs::Observation& observation, Rng& rng) override;

 private:
  const nets::SacNetworks& networks_;
  nets::ActMode mode_;
};

struct EpisodeStats {
  int steps = 0;
  std::vector<double> total_reward;   // per UAV
  std::vector<sim::UavStatus> status;  // final, per UAV
  std::vector<double> path_length;    // sum of per-step displacement norms
  std::vector<int> active_steps;      // steps taken before turning terminal
  std::vector<sim::Vec3> start;
  std::vector<sim::Vec3> goal;
  std::vector<sim::Vec3> final_position;

  double mean_reward() const;
};

using TransitionSink = std::function<void(Transition&&)>;

// Runs one episode from `world` until every UAV is terminal or t_max steps
// have elapsed. Each Active UAV acts on its own observation; every resulting
// transition is handed to `sink` (may be empty). Trajectory records, when a
// logger is given, cover the initial state and every step.
EpisodeStats collect_episode(sim::WorldState world, Policy& policy, const EnvConfig& env, Rng& rng,
                             const TransitionSink& sink, sim::TrajectoryLogger* logger = nullptr);

}  // namespace uavnav::train
