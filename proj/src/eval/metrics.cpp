#include "uavnav/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "uavnav/common/errors.h"

namespace uavnav::eval {
namespace {

std::size_t count_uavs(std::span<const EpisodeResult> results) {
  std::size_t n = 0;
  for (const EpisodeResult& e : results) n += e.uavs.size();
  if (n == 0) throw UndefinedMetric("metric over an empty result set");
  return n;
}

MeanStd mean_std(const std::vector<double>& xs) {
  double sum = 0.0;
  for (const double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (const double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(xs.size()))};
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double compute_spl(std::span<const EpisodeResult> results) {
  const std::size_t n = count_uavs(results);
  double sum = 0.0;
  for (const EpisodeResult& e : results) {
    for (const UavResult& u : e.uavs) {
      if (u.success) sum += u.shortest_path / std::max(u.path_length, u.shortest_path);
    }
  }
  return sum / static_cast<double>(n);
}

double compute_success_rate(std::span<const EpisodeResult> results) {
  const std::size_t n = count_uavs(results);
  std::size_t ok = 0;
  for (const EpisodeResult& e : results) {
    for (const UavResult& u : e.uavs) ok += u.success ? 1 : 0;
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

MeanStd compute_extra_distance(std::span<const EpisodeResult> results) {
  count_uavs(results);
  std::vector<double> extra;
  for (const EpisodeResult& e : results) {
    for (const UavResult& u : e.uavs) {
      if (u.success) extra.push_back(u.path_length - u.shortest_path);
    }
  }
  if (extra.empty()) throw UndefinedMetric("extra distance: no successful UAV");
  return mean_std(extra);
}

MeanStd compute_average_speed(std::span<const EpisodeResult> results) {
  count_uavs(results);
  std::vector<double> speeds;
  for (const EpisodeResult& e : results) {
    for (const UavResult& u : e.uavs) speeds.push_back(u.mean_speed);
  }
  return mean_std(speeds);
}

MetricsReport make_report(std::span<const EpisodeResult> results) {
  MetricsReport r;
  r.success_rate = compute_success_rate(results);
  r.spl = compute_spl(results);
  try {
    r.extra_distance = compute_extra_distance(results);
    for (const EpisodeResult& e : results) {
      for (const UavResult& u : e.uavs) r.extra_distance_samples += u.success ? 1 : 0;
    }
  } catch (const UndefinedMetric&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.extra_distance = {nan, nan};
  }
  r.average_speed = compute_average_speed(results);
  r.n_episodes = static_cast<int>(results.size());
  r.n_uavs = results.empty() ? 0 : static_cast<int>(results.front().uavs.size());
  return r;
}

std::string format_report_table(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  auto row = [&out](const std::string& name, const std::string& value) {
    out << std::left << std::setw(26) << name << std::right << std::setw(20) << value << '\n';
  };
  auto num = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
  };
  auto pm = [&num](const MeanStd& m) { return num(m.mean) + " +/- " + num(m.std); };
  row("UAVs per episode", std::to_string(r.n_uavs));
  row("episodes", std::to_string(r.n_episodes));
  row("success rate", num(r.success_rate));
  row("SPL", num(r.spl));
  row("extra distance [m] (*)", std::isfinite(r.extra_distance.mean) ? pm(r.extra_distance) : "n/a");
  row("average speed [m/s]", pm(r.average_speed));
  out << "(*) over " << r.extra_distance_samples << " successful UAVs only\n";
  return out.str();
}

nlohmann::json report_to_json(const MetricsReport& r) {
  return {{"type", "report"},
          {"n_uavs", r.n_uavs},
          {"n_episodes", r.n_episodes},
          {"success_rate", r.success_rate},
          {"spl", r.spl},
          {"extra_distance_mean", finite_or_null(r.extra_distance.mean)},
          {"extra_distance_std", finite_or_null(r.extra_distance.std)},
          {"extra_distance_samples", r.extra_distance_samples},
          {"extra_distance_over", "successful_uavs"},
          {"average_speed_mean", r.average_speed.mean},
          {"average_speed_std", r.average_speed.std}};
}

nlohmann::json episode_to_json(const EpisodeResult& e, int index) {
  nlohmann::json uavs = nlohmann::json::array();
  for (const UavResult& u : e.uavs) {
    uavs.push_back({{"success", u.success},
                    {"path_length", u.path_length},
                    {"shortest_path", u.shortest_path},
                    {"steps", u.steps},
                    {"mean_speed", u.mean_speed}});
  }
  return {{"type", "episode"},
          {"episode", index},
          {"seed", e.seed},
          {"scenario", std::string(sim::to_string(e.spec.kind))},
          {"uavs", uavs}};
}

}  // namespace uavnav::eval
