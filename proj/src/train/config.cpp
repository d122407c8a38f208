#include "uavnav/train/config.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "uavnav/common/errors.h"

namespace uavnav::train {
namespace {

int as_int(const IniEntry& e) {
  const long long v = parse_int(e);
  if (v < INT32_MIN || v > INT32_MAX) throw ConfigError("config key '" + e.key + "': value out of range");
  return static_cast<int>(v);
}

float as_float(const IniEntry& e) { return static_cast<float>(parse_double(e)); }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void EnvConfig::validate() const {
  try {
    camera.validate();
    reward.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  require(dt > 0.0, "env.dt must be positive");
  require(t_max >= 1, "train.t_max must be at least 1");
}

void SacHyper::validate() const {
  require(batch_size >= 1, "sac.batch_size must be positive");
  require(gamma > 0.0 && gamma < 1.0, "sac.gamma must lie in (0, 1)");
  require(critic_lr > 0 && actor_lr > 0 && ae_lr > 0 && alpha_lr > 0, "sac: learning rates must be positive");
  require(tau_q > 0.0 && tau_q <= 1.0, "sac.tau_q must lie in (0, 1]");
  require(tau_enc > 0.0 && tau_enc <= 1.0, "sac.tau_enc must lie in (0, 1]");
  require(actor_update_freq >= 1, "sac.actor_update_freq must be positive");
  require(critic_target_update_freq >= 1, "sac.critic_target_update_freq must be positive");
  require(lambda_z >= 0.0 && lambda_theta >= 0.0, "sac: regularisation weights must be non-negative");
}

void TrainConfig::validate() const {
  try {
    scenario.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  env.validate();
  resolved_net().validate();
  sac.validate();
  require(max_episodes >= 1, "train.max_episodes must be positive");
  require(update_times >= 0, "train.update_times must be non-negative");
  require(buffer_capacity >= 1, "train.buffer_capacity must be positive");
  require(sac.batch_size <= buffer_capacity, "sac.batch_size must not exceed train.buffer_capacity");
  require(warmup_transitions >= 0, "train.warmup_transitions must be non-negative");
  require(checkpoint_every >= 0, "train.checkpoint_every must be non-negative");
}

nets::NetConfig TrainConfig::resolved_net() const {
  nets::NetConfig n = net;
  n.image_height = env.camera.height;
  n.image_width = env.camera.width;
  return n;
}

void apply_train_key(TrainConfig& c, const IniEntry& e) {
  const std::string& k = e.key;
  const auto dot = k.find('.');
  const std::string section = dot == std::string::npos ? std::string() : k.substr(0, dot);
  const std::string name = dot == std::string::npos ? k : k.substr(dot + 1);
  if (section == "scenario" && name != "seed") {
    IniEntry inner = e;
    inner.key = name;
    try {
      sim::apply_scenario_key(c.scenario, inner);
    } catch (const ConfigError&) {
      throw ConfigError("unknown config key '" + k + "'");
    }
    return;
  }

  if (k == "camera.width") c.env.camera.width = as_int(e);
  else if (k == "camera.height") c.env.camera.height = as_int(e);
  else if (k == "camera.hfov_deg") c.env.camera.horizontal_fov = parse_double(e) * std::numbers::pi / 180.0;
  else if (k == "camera.max_depth") c.env.camera.max_depth = parse_double(e);
  else if (k == "reward.r_arrival") c.env.reward.r_arrival = parse_double(e);
  else if (k == "reward.r_collision") c.env.reward.r_collision = parse_double(e);
  else if (k == "reward.w_goal") c.env.reward.w_goal = parse_double(e);
  else if (k == "reward.w_avoid") c.env.reward.w_avoid = parse_double(e);
  else if (k == "reward.d_safe") c.env.reward.d_safe = parse_double(e);
  else if (k == "reward.arrival_radius") c.env.reward.arrival_radius = parse_double(e);
  else if (k == "net.latent_dim") c.net.latent_dim = as_int(e);
  else if (k == "net.hidden") c.net.hidden = as_int(e);
  else if (k == "net.filters") c.net.filters = as_int(e);
  else if (k == "net.log_std_min") c.net.log_std_min = as_float(e);
  else if (k == "net.log_std_max") c.net.log_std_max = as_float(e);
  else if (k == "sac.batch_size") c.sac.batch_size = as_int(e);
  else if (k == "sac.gamma") c.sac.gamma = parse_double(e);
  else if (k == "sac.critic_lr") c.sac.critic_lr = as_float(e);
  else if (k == "sac.actor_lr") c.sac.actor_lr = as_float(e);
  else if (k == "sac.ae_lr") c.sac.ae_lr = as_float(e);
  else if (k == "sac.alpha_lr") c.sac.alpha_lr = as_float(e);
  else if (k == "sac.tau_q") c.sac.tau_q = parse_double(e);
  else if (k == "sac.tau_enc") c.sac.tau_enc = parse_double(e);
  else if (k == "sac.actor_update_freq") c.sac.actor_update_freq = as_int(e);
  else if (k == "sac.critic_target_update_freq") c.sac.critic_target_update_freq = as_int(e);
  else if (k == "sac.target_entropy") c.sac.target_entropy = parse_double(e);
  else if (k == "sac.lambda_z") c.sac.lambda_z = parse_double(e);
  else if (k == "sac.lambda_theta") c.sac.lambda_theta = parse_double(e);
  else if (k == "train.max_episodes") c.max_episodes = as_int(e);
  else if (k == "train.update_times") c.update_times = as_int(e);
  else if (k == "train.buffer_capacity") c.buffer_capacity = as_int(e);
  else if (k == "train.warmup_transitions") c.warmup_transitions = as_int(e);
  else if (k == "train.checkpoint_every") c.checkpoint_every = as_int(e);
  else if (k == "train.seed") c.seed = parse_uint(e);
  else if (k == "train.t_max") c.env.t_max = as_int(e);
  else if (k == "train.dt") c.env.dt = parse_double(e);
  else throw ConfigError("unknown config key '" + k + "'");
}

TrainConfig parse_train_config(std::string_view text) {
  TrainConfig config;
  for (const IniEntry& entry : parse_ini(text)) apply_train_key(config, entry);
  return config;
}

std::string format_train_config(const TrainConfig& c) {
  std::ostringstream out;
  out << "[scenario]\n"
      << "kind = " << sim::to_string(c.scenario.kind) << '\n'
      << "n_uavs = " << c.scenario.n_uavs << '\n'
      << "density = " << format_number(c.scenario.density) << '\n'
      << "circle_radius = " << format_number(c.scenario.circle_radius) << '\n'
      << "altitude = " << format_number(c.scenario.altitude) << '\n'
      << "collision_radius = " << format_number(c.scenario.collision_radius) << '\n'
      << "\n[camera]\n"
      << "width = " << c.env.camera.width << '\n'
      << "height = " << c.env.camera.height << '\n'
      << "hfov_deg = " << format_number(c.env.camera.horizontal_fov * 180.0 / std::numbers::pi) << '\n'
      << "max_depth = " << format_number(c.env.camera.max_depth) << '\n'
      << "\n[reward]\n"
      << "r_arrival = " << format_number(c.env.reward.r_arrival) << '\n'
      << "r_collision = " << format_number(c.env.reward.r_collision) << '\n'
      << "w_goal = " << format_number(c.env.reward.w_goal) << '\n'
      << "w_avoid = " << format_number(c.env.reward.w_avoid) << '\n'
      << "d_safe = " << format_number(c.env.reward.d_safe) << '\n'
      << "arrival_radius = " << format_number(c.env.reward.arrival_radius) << '\n'
      << "\n[net]\n"
      << "latent_dim = " << c.net.latent_dim << '\n'
      << "hidden = " << c.net.hidden << '\n'
      << "filters = " << c.net.filters << '\n'
      << "log_std_min = " << format_number(c.net.log_std_min) << '\n'
      << "log_std_max = " << format_number(c.net.log_std_max) << '\n'
      << "\n[sac]\n"
      << "batch_size = " << c.sac.batch_size << '\n'
      << "gamma = " << format_number(c.sac.gamma) << '\n'
      << "critic_lr = " << format_number(c.sac.critic_lr) << '\n'
      << "actor_lr = " << format_number(c.sac.actor_lr) << '\n'
      << "ae_lr = " << format_number(c.sac.ae_lr) << '\n'
      << "alpha_lr = " << format_number(c.sac.alpha_lr) << '\n'
      << "tau_q = " << format_number(c.sac.tau_q) << '\n'
      << "tau_enc = " << format_number(c.sac.tau_enc) << '\n'
      << "actor_update_freq = " << c.sac.actor_update_freq << '\n'
      << "critic_target_update_freq = " << c.sac.critic_target_update_freq << '\n'
      << "target_entropy = " << format_number(c.sac.target_entropy) << '\n'
      << "lambda_z = " << format_number(c.sac.lambda_z) << '\n'
      << "lambda_theta = " << format_number(c.sac.lambda_theta) << '\n'
      << "\n[train]\n"
      << "max_episodes = " << c.max_episodes << '\n'
      << "update_times = " << c.update_times << '\n'
      << "buffer_capacity = " << c.buffer_capacity << '\n'
      << "warmup_transitions = " << c.warmup_transitions << '\n'
      << "checkpoint_every = " << c.checkpoint_every << '\n'
      << "seed = " << c.seed << '\n'
      << "t_max = " << c.env.t_max << '\n'
      << "dt = " << format_number(c.env.dt) << '\n';
  return out.str();
}

}  // namespace uavnav::train
