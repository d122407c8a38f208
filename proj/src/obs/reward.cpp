#include "uavnav/obs/reward.h"

#include <algorithm>

#include "uavnav/common/errors.h"

namespace uavnav::obs {

void RewardParams::validate() const {
  if (!(w_avoid < 0.0)) throw ConfigError("reward: w_avoid must be negative");
  if (!(d_safe > 0.0)) throw ConfigError("reward: d_safe must be positive");
  if (!(arrival_radius > 0.0)) throw ConfigError("reward: arrival_radius must be positive");
}

double goal_reward(double prev_dist, double curr_dist, const RewardParams& params) {
  if (curr_dist < params.arrival_radius) return params.r_arrival;
  return params.w_goal * (prev_dist - curr_dist);
}

double avoid_reward(bool collided, double d_min, const RewardParams& params) {
  if (collided) return params.r_collision;
  return params.w_avoid * std::max(params.d_safe - d_min, 0.0);
}

}  // namespace uavnav::obs
