#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "uavnav/common/ini.h"
#include "uavnav/sim/world.h"

namespace uavnav::sim {

enum class ScenarioKind { Random, Circle };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view text);

// Scene densities for the random scenarios, UAV per cubic meter.
inline constexpr double kDensitySmall = 0.1;
inline constexpr double kDensityMedium = 0.06;
inline constexpr double kDensityLarge = 0.04;

// Maximum rejection-sampling draws per UAV before generation gives up.
inline constexpr int kMaxSamplingAttempts = 10000;
inline constexpr double kMinStartGoalDistance = 5.0;
inline constexpr double kRandomFloorHeight = 1.0;

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Random;
  int n_uavs = 8;
  double density = kDensityMedium;  // Random only
  double circle_radius = 12.0;      // Circle only
  double altitude = 5.0;            // Circle only
  std::uint64_t seed = 0;
  double collision_radius = kDefaultCollisionRadius;

  void validate() const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// Edge length of the cubic workspace holding `n_uavs` at `density`.
double random_workspace_side(int n_uavs, double density);

// Random: starts/goals drawn uniformly in a cube of volume n/density centred
// on the origin in x/y with its floor at z = 1 m. Starts are >= 4R apart,
// goals >= 4R apart, and each start is >= 5 m from its own goal.
// Circle: UAV k starts at angle 2*pi*k/N on the circle and flies to the
// antipodal point. Every UAV initially faces its goal.
// Throws GenerationFailure when a UAV cannot be placed within
// kMaxSamplingAttempts draws.
WorldState generate_scenario(const ScenarioSpec& spec);

// Key = value text, one field per line. parse_scenario_spec rejects unknown
// keys and accepts any subset of fields (the rest keep their defaults).
std::string format_scenario_spec(const ScenarioSpec& spec);
ScenarioSpec parse_scenario_spec(std::string_view text);

// Applies one unqualified key (e.g. "density") to `spec`; throws ConfigError
// for unknown keys or malformed values.
void apply_scenario_key(ScenarioSpec& spec, const IniEntry& entry);

}  // namespace uavnav::sim
