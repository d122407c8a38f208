#include "uavnav/sim/scenario.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "uavnav/common/errors.h"
#include "uavnav/common/ini.h"
#include "uavnav/common/random.h"

namespace uavnav::sim {
namespace {

double face_goal_yaw(const Vec3& start, const Vec3& goal) {
  const Vec3 d = goal - start;
  if (std::hypot(d.x(), d.y()) < 1e-12) return 0.0;
  return wrap_angle(std::atan2(d.y(), d.x()));
}

WorldState generate_random(const ScenarioSpec& spec) {
  const double side = random_workspace_side(spec.n_uavs, spec.density);
  WorldState world;
  world.collision_radius = spec.collision_radius;
  world.workspace.min_corner = Vec3(-side / 2.0, -side / 2.0, kRandomFloorHeight);
  world.workspace.max_corner = Vec3(side / 2.0, side / 2.0, kRandomFloorHeight + side);

  Rng rng(derive_seed(spec.seed, seed_stream::kScenario));
  std::uniform_real_distribution<double> ux(world.workspace.min_corner.x(), world.workspace.max_corner.x());
  std::uniform_real_distribution<double> uy(world.workspace.min_corner.y(), world.workspace.max_corner.y());
  std::uniform_real_distribution<double> uz(world.workspace.min_corner.z(), world.workspace.max_corner.z());
  auto draw = [&] {
    const double x = ux(rng);
    const double y = uy(rng);
    const double z = uz(rng);
    return Vec3(x, y, z);
  };

  const double separation = 4.0 * spec.collision_radius;
  for (int k = 0; k < spec.n_uavs; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSamplingAttempts && !placed; ++attempt) {
      const Vec3 start = draw();
      const Vec3 goal = draw();
      if ((goal - start).norm() < kMinStartGoalDistance) continue;
      bool clear = true;
      for (const UavState& other : world.uavs) {
        if ((other.position - start).norm() < separation || (other.goal - goal).norm() < separation) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      UavState uav;
      uav.position = start;
      uav.goal = goal;
      uav.yaw = face_goal_yaw(start, goal);
      world.uavs.push_back(uav);
      placed = true;
    }
    if (!placed) {
      std::ostringstream msg;
      msg << "random scenario: could not place UAV " << k << " of " << spec.n_uavs << " within "
          << kMaxSamplingAttempts << " attempts (density " << format_number(spec.density) << " UAV/m^3, side " << side
          << " m)";
      throw GenerationFailure(msg.str());
    }
  }
  return world;
}

WorldState generate_circle(const ScenarioSpec& spec) {
  WorldState world;
  world.collision_radius = spec.collision_radius;
  const double margin = 5.0;
  const double half = spec.circle_radius + margin;
  world.workspace.min_corner = Vec3(-half, -half, std::min(kRandomFloorHeight, spec.altitude));
  world.workspace.max_corner = Vec3(half, half, spec.altitude + spec.circle_radius);

  for (int k = 0; k < spec.n_uavs; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / spec.n_uavs;
    UavState uav;
    uav.position = Vec3(spec.circle_radius * std::cos(angle), spec.circle_radius * std::sin(angle), spec.altitude);
    // Antipode by negation: exact, so every start-goal segment crosses the centre.
    uav.goal = Vec3(-uav.position.x(), -uav.position.y(), spec.altitude);
    uav.yaw = face_goal_yaw(uav.position, uav.goal);
    world.uavs.push_back(uav);
  }
  return world;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  return kind == ScenarioKind::Random ? "random" : "circle";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "random") return ScenarioKind::Random;
  if (text == "circle") return ScenarioKind::Circle;
  throw ConfigError("unknown scenario kind '" + std::string(text) + "' (expected random or circle)");
}

void ScenarioSpec::validate() const {
  if (n_uavs < 1) throw ConfigError("scenario: n_uavs must be >= 1");
  if (!(collision_radius > 0.0)) throw ConfigError("scenario: collision_radius must be > 0");
  if (kind == ScenarioKind::Random) {
    if (!(density > 0.0) || !std::isfinite(density)) throw ConfigError("scenario: density must be > 0");
  } else {
    if (!(circle_radius > 0.0)) throw ConfigError("scenario: circle_radius must be > 0");
    if (!(altitude > 0.0)) throw ConfigError("scenario: altitude must be > 0");
  }
}

double random_workspace_side(int n_uavs, double density) { return std::cbrt(n_uavs / density); }

WorldState generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  return spec.kind == ScenarioKind::Random ? generate_random(spec) : generate_circle(spec);
}

std::string format_scenario_spec(const ScenarioSpec& spec) {
  std::ostringstream out;
  out << "kind = " << to_string(spec.kind) << '\n'
      << "n_uavs = " << spec.n_uavs << '\n'
      << "density = " << format_number(spec.density) << '\n'
      << "circle_radius = " << format_number(spec.circle_radius) << '\n'
      << "altitude = " << format_number(spec.altitude) << '\n'
      << "seed = " << spec.seed << '\n'
      << "collision_radius = " << format_number(spec.collision_radius) << '\n';
  return out.str();
}

ScenarioSpec parse_scenario_spec(std::string_view text) {
  ScenarioSpec spec;
  for (const IniEntry& entry : parse_ini(text)) {
    apply_scenario_key(spec, entry);
  }
  spec.validate();
  return spec;
}

void apply_scenario_key(ScenarioSpec& spec, const IniEntry& entry) {
  const std::string& key = entry.key;
  if (key == "kind") {
    spec.kind = parse_scenario_kind(entry.value);
  } else if (key == "n_uavs") {
    spec.n_uavs = static_cast<int>(parse_int(entry));
  } else if (key == "density") {
    spec.density = parse_double(entry);
  } else if (key == "circle_radius") {
    spec.circle_radius = parse_double(entry);
  } else if (key == "altitude") {
    spec.altitude = parse_double(entry);
  } else if (key == "seed") {
    spec.seed = parse_uint(entry);
  } else if (key == "collision_radius") {
    spec.collision_radius = parse_double(entry);
  } else {
    throw ConfigError("unknown scenario key '" + key + "'");
  }
}

}  // namespace uavnav::sim
