#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavnav/sim/scenario.h"

namespace uavnav::eval {

struct UavResult {
  bool success = false;
  double path_length = 0.0;    // p, metres flown
  double shortest_path = 0.0;  // l, straight start-goal distance
  int steps = 0;               // steps taken while Active
  double mean_speed = 0.0;     // p / (steps * dt), 0 when steps == 0
};

struct EpisodeResult {
  sim::ScenarioSpec spec;
  std::uint64_t seed = 0;
  std::vector<UavResult> uavs;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct MetricsReport {
  double success_rate = 0.0;
  double spl = 0.0;
  MeanStd extra_distance;  // successful UAVs only; NaN when there are none
  std::size_t extra_distance_samples = 0;
  MeanStd average_speed;
  int n_uavs = 0;
  int n_episodes = 0;
};

// All of these throw UndefinedMetric when there is no UAV entry at all.
double compute_spl(std::span<const EpisodeResult> results);
double compute_success_rate(std::span<const EpisodeResult> results);
// Mean and std of p - l over successful UAVs; UndefinedMetric if none succeeded.
MeanStd compute_extra_distance(std::span<const EpisodeResult> results);
MeanStd compute_average_speed(std::span<const EpisodeResult> results);

MetricsReport make_report(std::span<const EpisodeResult> results);

std::string format_report_table(const MetricsReport& report);
nlohmann::json report_to_json(const MetricsReport& report);
nlohmann::json episode_to_json(const EpisodeResult& episode, int index);

}  // namespace uavnav::eval
