#include "uavnav/train/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "uavnav/common/errors.h"
#include "uavnav/sim/scenario.h"

namespace uavnav::train {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Uniform actions until `warmup` actions have been taken, then the
// stochastic network policy.
class TrainingPolicy : public Policy {
 public:
  TrainingPolicy(const nets::SacNetworks& nets, std::uint64_t warmup, std::uint64_t& taken)
      : network_(nets, nets::ActMode::Sample), warmup_(warmup), taken_(taken) {}

  std::array<float, 3> act(const obs::Observation& o, Rng& rng) override {
    const bool explore = taken_ < warmup_;
    ++taken_;
    return explore ? uniform_.act(o, rng) : network_.act(o, rng);
  }

 private:
  UniformPolicy uniform_;
  NetworkPolicy network_;
  std::uint64_t warmup_;
  std::uint64_t& taken_;
};

struct Mean {
  double sum = 0.0;
  int count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  double value() const { return count ? sum / count : std::numeric_limits<double>::quiet_NaN(); }
};

}  // namespace

std::string format_metrics_row(const EpisodeLog& log) {
  return std::to_string(log.episode) + "," + std::to_string(log.total_env_steps) + "," + number(log.mean_reward) + "," +
         number(log.critic_loss) + "," + number(log.actor_loss) + "," + number(log.ae_loss) + "," + number(log.alpha);
}

Trainer::Trainer(TrainConfig config, std::filesystem::path output_dir)
    : config_((config.validate(), std::move(config))),
      output_dir_(std::move(output_dir)),
      agent_(config_.resolved_net(), config_.sac, config_.seed),
      buffer_(static_cast<std::size_t>(config_.buffer_capacity)) {}

void Trainer::resume_from(const std::filesystem::path& checkpoint_dir) {
  agent_.load(checkpoint_dir);
  for (const IniEntry& e : parse_ini(read_file(checkpoint_dir / output_files::kProgress))) {
    if (e.key == "next_episode") next_episode_ = static_cast<int>(parse_int(e));
    else if (e.key == "total_env_steps") total_env_steps_ = parse_uint(e);
    else if (e.key == "actions_taken") actions_taken_ = parse_uint(e);
    else throw CheckpointError("unknown progress key '" + e.key + "'");
  }
}

void Trainer::save_checkpoint(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  agent_.save(dir);
  write_file(dir / output_files::kConfigEcho, format_train_config(config_));
  write_file(dir / output_files::kProgress, "next_episode = " + std::to_string(next_episode_) +
                                                "\ntotal_env_steps = " + std::to_string(total_env_steps_) +
                                                "\nactions_taken = " + std::to_string(actions_taken_) + "\n");
}

TrainResult Trainer::run(const std::function<void(const EpisodeLog&)>& on_episode) {
  namespace f = output_files;
  std::filesystem::create_directories(output_dir_);
  write_file(output_dir_ / f::kConfigEcho, format_train_config(config_));
  const std::filesystem::path metrics_path = output_dir_ / f::kMetrics;
  const bool fresh_log = next_episode_ == 0 || !std::filesystem::exists(metrics_path);
  std::ofstream metrics(metrics_path, fresh_log ? std::ios::trunc : std::ios::app);
  if (!metrics) throw std::runtime_error("cannot open " + metrics_path.string());
  if (fresh_log) metrics << kMetricsHeader << '\n';

  const std::size_t batch_size = static_cast<std::size_t>(config_.sac.batch_size);
  const std::size_t min_fill = std::max(batch_size, static_cast<std::size_t>(config_.warmup_transitions));
  TrainResult result;
  const int first_episode = next_episode_;
  int episode = first_episode;
  std::int64_t iteration_in_episode = -1;
  Mean critic, actor, ae;
  try {
    for (; episode < config_.max_episodes; ++episode) {
      const auto ep = static_cast<std::uint64_t>(episode);
      sim::ScenarioSpec spec = config_.scenario;
      spec.seed = derive_seed(config_.seed, seed_stream::kScenario, ep);
      Rng policy_rng(derive_seed(config_.seed, seed_stream::kPolicy, ep));
      TrainingPolicy policy(agent_.networks(), static_cast<std::uint64_t>(config_.warmup_transitions), actions_taken_);
      const EpisodeStats stats = collect_episode(sim::generate_scenario(spec), policy, config_.env, policy_rng,
                                                 [this](Transition&& t) {
                                                   buffer_.push(std::move(t));
                                                   ++total_env_steps_;
                                                 });

      critic = actor = ae = Mean{};
      if (buffer_.size() >= min_fill) {
        Rng batch_rng(derive_seed(config_.seed, seed_stream::kBatch, ep));
        Rng noise_rng(derive_seed(config_.seed, seed_stream::kUpdateNoise, ep));
        for (iteration_in_episode = 0; iteration_in_episode < config_.update_times; ++iteration_in_episode) {
          const Batch batch = make_batch(buffer_.sample(batch_size, batch_rng));
          const SacAgent::IterationLosses losses = agent_.update(batch, noise_rng);
          critic.add(losses.critic);
          ae.add(losses.autoencoder);
          if (losses.actor_ran) actor.add(losses.actor);
        }
        iteration_in_episode = -1;
      }

      next_episode_ = episode + 1;
      const EpisodeLog log{episode + 1,    total_env_steps_, stats.mean_reward(), critic.value(), actor.value(),
                           ae.value(), agent_.networks().alpha()};
      metrics << format_metrics_row(log) << '\n';
      metrics.flush();
      if (!metrics) throw std::runtime_error("cannot write " + metrics_path.string());
      if (on_episode) on_episode(log);

      if (config_.checkpoint_every > 0 && next_episode_ % config_.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "episode_%06d", next_episode_);
        save_checkpoint(output_dir_ / f::kCheckpoints / name);
      }
    }
  } catch (const NumericalError& e) {
    std::ostringstream dump;
    dump << "error = " << e.what() << "\nepisode = " << episode + 1 << "\nupdate_iteration = " << iteration_in_episode
         << "\nagent_iterations = " << agent_.iterations() << "\ntotal_env_steps = " << total_env_steps_
         << "\nbuffer_size = " << buffer_.size() << "\nalpha = " << number(agent_.networks().alpha())
         << "\ncritic_loss_mean = " << number(critic.value()) << "\nactor_loss_mean = " << number(actor.value())
         << "\nae_loss_mean = " << number(ae.value()) << '\n';
    write_file(output_dir_ / f::kNanDump, dump.str());
    throw;
  }

  result.final_checkpoint = output_dir_ / f::kCheckpoints / f::kFinal;
  save_checkpoint(result.final_checkpoint);
  result.episodes_run = config_.max_episodes - first_episode;
  result.total_env_steps = total_env_steps_;
  return result;
}

TrainConfig load_config_echo(const std::filesystem::path& dir) {
  TrainConfig config = parse_train_config(read_file(dir / output_files::kConfigEcho));
  config.validate();
  return config;
}

std::unique_ptr<nets::SacNetworks> load_networks(const std::filesystem::path& checkpoint_dir) {
  const TrainConfig config = load_config_echo(checkpoint_dir);
  auto nets = std::make_unique<nets::SacNetworks>(config.resolved_net(), config.seed);
  nets->load(checkpoint_dir);
  return nets;
}

}  // namespace uavnav::train
