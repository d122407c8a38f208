#pragma once

namespace uavnav::obs {

struct RewardParams {
  double r_arrival = 50.0;
  double r_collision = -10.0;
  double w_goal = 3.0;
  double w_avoid = -0.05;
  double d_safe = 5.0;
  double arrival_radius = 0.5;

  void validate() const;
};

// r_arrival inside the arrival radius, otherwise w_goal * progress.
double goal_reward(double prev_dist, double curr_dist, const RewardParams& params);

// r_collision on contact, otherwise w_avoid * max(d_safe - d_min, 0).
double avoid_reward(bool collided, double d_min, const RewardParams& params);

inline double total_reward(double goal_part, double avoid_part) { return goal_part + avoid_part; }

}  // namespace uavnav::obs
