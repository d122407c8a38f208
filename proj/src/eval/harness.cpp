#include "uavnav/eval/harness.h"

#include <cstdio>
#include <fstream>

#include "uavnav/common/errors.h"
#include "uavnav/common/random.h"
#include "uavnav/sim/trajectory_log.h"
#include "uavnav/train/trainer.h"

namespace uavnav::eval {

EpisodeResult summarize_episode(const train::EpisodeStats& stats, const sim::ScenarioSpec& spec, double dt) {
  EpisodeResult out;
  out.spec = spec;
  out.seed = spec.seed;
  for (std::size_t i = 0; i < stats.status.size(); ++i) {
    UavResult u;
    u.success = stats.status[i] == sim::UavStatus::Arrived;
    u.path_length = stats.path_length[i];
    u.shortest_path = (stats.goal[i] - stats.start[i]).norm();
    u.steps = stats.active_steps[i];
    u.mean_speed = u.steps > 0 ? u.path_length / (u.steps * dt) : 0.0;
    out.uavs.push_back(u);
  }
  return out;
}

EvalOutcome run_evaluation(train::Policy& policy, const EvalOptions& options) {
  if (options.episodes < 1) throw ConfigError("eval: episodes must be positive");
  options.env.validate();
  if (options.output_dir) std::filesystem::create_directories(*options.output_dir);

  EvalOutcome outcome;
  for (int m = 0; m < options.episodes; ++m) {
    sim::ScenarioSpec spec = options.scenario;
    spec.seed = derive_seed(options.seed, seed_stream::kEvaluation, static_cast<std::uint64_t>(m));
    Rng rng(derive_seed(spec.seed, seed_stream::kPolicy));
    std::optional<sim::TrajectoryLogger> logger;
    if (options.output_dir) {
      char name[40];
      std::snprintf(name, sizeof name, "trajectory_%04d.csv", m + 1);
      const auto path = *options.output_dir / name;
      std::filesystem::remove(path);  // the logger appends
      logger.emplace(path);
    }
    const train::EpisodeStats stats = train::collect_episode(sim::generate_scenario(spec), policy, options.env, rng, {},
                                                             logger ? &*logger : nullptr);
    if (logger) logger->flush();
    outcome.episodes.push_back(summarize_episode(stats, spec, options.env.dt));
  }
  outcome.report = make_report(outcome.episodes);

  if (options.output_dir) {
    const auto path = *options.output_dir / "results.jsonl";
    std::ofstream out(path, std::ios::trunc);
    out << report_to_json(outcome.report).dump() << '\n';
    for (std::size_t m = 0; m < outcome.episodes.size(); ++m) {
      out << episode_to_json(outcome.episodes[m], static_cast<int>(m) + 1).dump() << '\n';
    }
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  return outcome;
}

EvalOutcome run_evaluation(const std::filesystem::path& checkpoint_dir, const EvalOptions& options) {
  const auto nets = train::load_networks(checkpoint_dir);
  if (nets->config().image_height != options.env.camera.height ||
      nets->config().image_width != options.env.camera.width) {
    throw ConfigError("eval: camera resolution differs from the checkpoint's network input");
  }
  train::NetworkPolicy policy(*nets, nets::ActMode::Mean);
  return run_evaluation(policy, options);
}

}  // namespace uavnav::eval
