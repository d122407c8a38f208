#include "uavnav/cli/cli.h"

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "uavnav/ad/checkpoint.h"
#include "uavnav/camera/depth_camera.h"
#include "uavnav/common/errors.h"
#include "uavnav/common/ini.h"
#include "uavnav/eval/harness.h"
#include "uavnav/nets/networks.h"
#include "uavnav/sim/scenario.h"
#include "uavnav/train/trainer.h"

namespace uavnav::cli {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct ScenarioFlags {
  std::string kind = "random";
  int n_uavs = 8;
  double density = sim::kDensityMedium;
  double radius = 12.0;
  double altitude = 5.0;

  void add_to(CLI::App& app) {
    app.add_option("--scenario", kind, "random or circle")->capture_default_str();
    app.add_option("--n-uavs", n_uavs, "number of UAVs")->capture_default_str();
    app.add_option("--density", density, "UAV per cubic metre (random)")->capture_default_str();
    app.add_option("--radius", radius, "circle radius in metres")->capture_default_str();
    app.add_option("--altitude", altitude, "circle altitude in metres")->capture_default_str();
  }

  sim::ScenarioSpec spec(std::uint64_t seed) const {
    sim::ScenarioSpec s;
    s.kind = sim::parse_scenario_kind(kind);
    s.n_uavs = n_uavs;
    s.density = density;
    s.circle_radius = radius;
    s.altitude = altitude;
    s.seed = seed;
    s.validate();
    return s;
  }
};

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::string resume;
};

struct EvalArgs {
  std::string checkpoint;
  bool baseline = false;
  ScenarioFlags scenario;
  int episodes = 10;
  std::uint64_t seed = 0;
  std::string output;
  std::optional<int> t_max;
};

struct RenderArgs {
  ScenarioFlags scenario;
  std::uint64_t seed = 0;
  long long uav = 0;
  std::string output;
  int width = 64;
  int height = 64;
  double hfov_deg = 90.0;
  double max_depth = 20.0;
};

struct InfoArgs {
  std::string checkpoint;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  train::TrainConfig config;
  if (!a.config.empty()) config = train::parse_train_config(slurp(a.config));
  for (const std::string& o : a.overrides) train::apply_train_key(config, parse_override(o));
  if (a.seed) config.seed = *a.seed;
  config.validate();
  const std::filesystem::path dir = a.output.empty() ? default_output_dir("train") : std::filesystem::path(a.output);

  train::Trainer trainer(config, dir);
  if (!a.resume.empty()) trainer.resume_from(a.resume);
  const train::TrainResult r = trainer.run([&out](const train::EpisodeLog& log) {
    out << "episode " << log.episode << "  steps " << log.total_env_steps << "  reward " << log.mean_reward
        << "  alpha " << log.alpha << '\n';
  });
  out << "trained " << r.episodes_run << " episodes, " << r.total_env_steps << " transitions\n"
      << "metrics: " << (dir / train::output_files::kMetrics).string() << '\n'
      << "checkpoint: " << r.final_checkpoint.string() << '\n';
  return exit_code::kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.baseline == !a.checkpoint.empty()) throw ConfigError("eval: give exactly one of --checkpoint or --baseline");
  eval::EvalOptions options;
  options.scenario = a.scenario.spec(0);
  options.episodes = a.episodes;
  options.seed = a.seed;
  options.output_dir = a.output.empty() ? default_output_dir("eval") : std::filesystem::path(a.output);

  eval::EvalOutcome outcome;
  if (a.baseline) {
    if (a.t_max) options.env.t_max = *a.t_max;
    train::StraightLinePolicy policy(options.env.dt);
    outcome = eval::run_evaluation(policy, options);
  } else {
    if (!std::filesystem::is_directory(a.checkpoint)) throw CheckpointError("no checkpoint at " + a.checkpoint);
    options.env = train::load_config_echo(a.checkpoint).env;
    if (a.t_max) options.env.t_max = *a.t_max;
    outcome = eval::run_evaluation(std::filesystem::path(a.checkpoint), options);
  }
  out << eval::format_report_table(outcome.report) << "results: " << (*options.output_dir / "results.jsonl").string()
      << '\n';
  return exit_code::kOk;
}

int cmd_render(const RenderArgs& a, std::ostream& out) {
  const sim::WorldState world = sim::generate_scenario(a.scenario.spec(a.seed));
  if (a.uav < 0 || static_cast<std::size_t>(a.uav) >= world.size()) {
    throw ConfigError("render: --uav " + std::to_string(a.uav) + " is out of range (scenario has " +
                      std::to_string(world.size()) + " UAVs)");
  }
  camera::CameraModel cam;
  cam.width = a.width;
  cam.height = a.height;
  cam.horizontal_fov = a.hfov_deg * std::numbers::pi / 180.0;
  cam.max_depth = a.max_depth;
  try {
    cam.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  const camera::DepthFrame frame = camera::render_depth(world, static_cast<std::size_t>(a.uav), cam);
  const std::filesystem::path path =
      a.output.empty() ? default_output_dir("render") / ("uav_" + std::to_string(a.uav) + ".pgm")
                       : std::filesystem::path(a.output);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  camera::write_pgm16(frame, path);
  out << "wrote " << path.string() << " (" << frame.width << "x" << frame.height
      << "), min depth " << camera::min_depth(frame) << " m\n";
  return exit_code::kOk;
}

int cmd_info(const InfoArgs& a, std::ostream& out) {
  namespace f = nets::checkpoint_files;
  const std::filesystem::path dir(a.checkpoint);
  if (!std::filesystem::is_directory(dir)) throw CheckpointError("no checkpoint at " + a.checkpoint);
  const train::TrainConfig config = train::load_config_echo(dir);
  out << "checkpoint " << dir.string() << '\n';
  for (const char* file : {f::kEncoder, f::kDecoder, f::kActor, f::kCritic, f::kTargetEncoder, f::kTargetCritic,
                           f::kTemperature}) {
    const auto path = dir / file;
    const std::uint32_t version = ad::read_checkpoint_version(path);
    const std::vector<ad::StoredTensor> tensors = ad::read_tensors(path);
    std::size_t count = 0;
    for (const auto& t : tensors) count += t.values.size();
    out << file << "  version " << version << "  tensors " << tensors.size() << "  parameters " << count << '\n';
    for (const auto& t : tensors) out << "  " << t.name << ' ' << ad::shape_string(t.shape) << '\n';
  }
  const nets::NetConfig net = config.resolved_net();
  out << "latent_dim " << net.latent_dim << '\n'
      << "hidden " << net.hidden << '\n'
      << "image " << net.image_height << "x" << net.image_width << '\n'
      << "--- config ---\n"
      << train::format_train_config(config);
  return exit_code::kOk;
}

}  // namespace

std::filesystem::path default_output_dir(const std::string& subcommand) {
  const char* root = std::getenv(kOutputRootEnv);
  return std::filesystem::path(root && *root ? root : "runs") / subcommand;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-UAV depth-camera navigation: simulator, SAC trainer and evaluation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train the shared policy");
  train->add_option("--config", train_args.config, "sectioned key = value config file");
  train->add_option("--set", train_args.overrides, "override section.key=value (repeatable)");
  train->add_option("--output", train_args.output, "output directory");
  train->add_option("--seed", train_args.seed, "master seed (overrides train.seed)");
  train->add_option("--resume", train_args.resume, "checkpoint directory to resume from");

  EvalArgs eval_args;
  CLI::App* evalc = app.add_subcommand("eval", "evaluate a checkpoint or the straight-line baseline");
  evalc->add_option("--checkpoint", eval_args.checkpoint, "checkpoint directory");
  evalc->add_flag("--baseline", eval_args.baseline, "use the scripted straight-line policy");
  eval_args.scenario.add_to(*evalc);
  evalc->add_option("--episodes", eval_args.episodes, "number of episodes")->capture_default_str();
  evalc->add_option("--seed", eval_args.seed, "evaluation seed")->capture_default_str();
  evalc->add_option("--output", eval_args.output, "output directory");
  evalc->add_option("--t-max", eval_args.t_max, "episode step limit");

  RenderArgs render_args;
  CLI::App* render = app.add_subcommand("render", "write one depth frame as a 16-bit PGM");
  render_args.scenario.add_to(*render);
  render->add_option("--seed", render_args.seed, "scenario seed")->capture_default_str();
  render->add_option("--uav", render_args.uav, "observer index")->capture_default_str();
  render->add_option("--output", render_args.output, "output .pgm path");
  render->add_option("--width", render_args.width)->capture_default_str();
  render->add_option("--height", render_args.height)->capture_default_str();
  render->add_option("--hfov-deg", render_args.hfov_deg)->capture_default_str();
  render->add_option("--max-depth", render_args.max_depth)->capture_default_str();

  InfoArgs info_args;
  CLI::App* info = app.add_subcommand("info", "describe a checkpoint");
  info->add_option("--checkpoint", info_args.checkpoint, "checkpoint directory")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_args, out);
    if (evalc->parsed()) return cmd_eval(eval_args, out);
    if (render->parsed()) return cmd_render(render_args, out);
    return cmd_info(info_args, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_code::kNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const GenerationFailure& e) {
    err << "scenario error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
}

}  // namespace uavnav::cli
