#include "uavnav/train/rollout.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "uavnav/camera/depth_camera.h"
#include "uavnav/common/errors.h"

namespace uavnav::train {

std::array<float, 3> UniformPolicy::act(const obs::Observation&, Rng& rng) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  const float a = u(rng);
  const float b = u(rng);
  const float c = u(rng);
  return {a, b, c};
}

StraightLinePolicy::StraightLinePolicy(double dt, double heading_tolerance)
    : dt_(dt), heading_tolerance_(heading_tolerance) {
  if (!(dt > 0.0)) throw ContractViolation("straight-line policy: dt must be positive");
}

std::array<float, 3> StraightLinePolicy::act(const obs::Observation& o, Rng&) {
  using B = sim::CommandBounds;
  const double dx = o.rel_goal.x(), dy = o.rel_goal.y(), dz = o.rel_goal.z();
  const double horizontal = std::hypot(dx, dy);
  const double heading = horizontal > 1e-9 ? std::atan2(dy, dx) : 0.0;
  sim::VelocityCommand cmd;
  cmd.yaw_rate = std::clamp(heading / dt_, -B::kYawRateMax, B::kYawRateMax);
  if (std::abs(heading) <= heading_tolerance_) {
    // Largest speed along the segment that respects both velocity limits.
    double s = std::numeric_limits<double>::infinity();
    if (horizontal > 0.0) s = std::min(s, B::kForwardMax / horizontal);
    if (std::abs(dz) > 0.0) s = std::min(s, B::kClimbMax / std::abs(dz));
    if (std::isfinite(s)) {
      cmd.forward = s * horizontal;
      cmd.climb = s * dz;
    }
  }
  return nets::to_normalized(cmd);
}

std::array<float, 3> NetworkPolicy::act(const obs::Observation& observation, Rng& rng) {
  return networks_.act_squashed(observation, mode_, rng);
}

double EpisodeStats::mean_reward() const {
  if (total_reward.empty()) return 0.0;
  return std::accumulate(total_reward.begin(), total_reward.end(), 0.0) / static_cast<double>(total_reward.size());
}

EpisodeStats collect_episode(sim::WorldState world, Policy& policy, const EnvConfig& env, Rng& rng,
                             const TransitionSink& sink, sim::TrajectoryLogger* logger) {
  env.validate();
  const std::size_t n = world.size();
  EpisodeStats stats;
  stats.total_reward.assign(n, 0.0);
  stats.path_length.assign(n, 0.0);
  stats.active_steps.assign(n, 0);
  for (const sim::UavState& u : world.uavs) {
    stats.start.push_back(u.position);
    stats.goal.push_back(u.goal);
  }

  std::vector<obs::FrameHistory> history(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (world.uavs[i].status == sim::UavStatus::Active) {
      history[i].push(obs::normalize_frame(camera::render_depth(world, i, env.camera)));
    }
  }
  if (logger) logger->append(world);

  std::vector<sim::VelocityCommand> commands(n);
  std::vector<std::array<float, 3>> actions(n);
  std::vector<obs::Observation> current(n);
  std::vector<bool> acting(n);
  std::vector<bool> collided(n);
  for (int t = 0; t < env.t_max && !world.all_terminal(); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      acting[i] = world.uavs[i].status == sim::UavStatus::Active;
      commands[i] = sim::VelocityCommand{};
      if (!acting[i]) continue;
      current[i] = history[i].observe(world.uavs[i]);
      actions[i] = policy.act(current[i], rng);
      commands[i] = nets::to_command(actions[i]);
    }

    sim::WorldState next = sim::step_world(world, commands, env.dt);
    std::fill(collided.begin(), collided.end(), false);
    for (const auto& [a, b] : sim::detect_collisions(next)) {
      for (const std::size_t k : {a, b}) {
        if (sim::transition_status(next.uavs[k], sim::UavStatus::Collided)) collided[k] = true;
      }
    }
    for (const std::size_t k : sim::check_arrivals(next, env.reward.arrival_radius)) {
      sim::transition_status(next.uavs[k], sim::UavStatus::Arrived);
    }
    const bool last_step = t + 1 == env.t_max;
    if (last_step) {
      for (sim::UavState& u : next.uavs) sim::transition_status(u, sim::UavStatus::TimedOut);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!acting[i]) continue;
      const sim::UavState& before = world.uavs[i];
      const sim::UavState& after = next.uavs[i];
      const camera::DepthFrame frame = camera::render_depth(next, i, env.camera);
      history[i].push(obs::normalize_frame(frame));

      const double prev_dist = (before.goal - before.position).norm();
      const double curr_dist = (after.goal - after.position).norm();
      const double reward = obs::total_reward(obs::goal_reward(prev_dist, curr_dist, env.reward),
                                              obs::avoid_reward(collided[i], camera::min_depth(frame), env.reward));
      stats.total_reward[i] += reward;
      stats.path_length[i] += (after.position - before.position).norm();
      ++stats.active_steps[i];

      if (sink) {
        Transition tr;
        tr.obs = std::move(current[i]);
        tr.action = actions[i];
        tr.reward = static_cast<float>(reward);
        tr.next_obs = history[i].observe(after);
        tr.done = after.status == sim::UavStatus::Arrived || after.status == sim::UavStatus::Collided;
        sink(std::move(tr));
      }
    }
    world = std::move(next);
    ++stats.steps;
    if (logger) logger->append(world);
  }

  for (const sim::UavState& u : world.uavs) {
    stats.status.push_back(u.status);
    stats.final_position.push_back(u.position);
  }
  return stats;
}

}  // namespace uavnav::train
