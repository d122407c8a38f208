#include "uavnav/sim/world.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "uavnav/common/errors.h"

namespace uavnav::sim {

std::string_view to_string(UavStatus status) {
  switch (status) {
    case UavStatus::Active:
      return "active";
    case UavStatus::Arrived:
      return "arrived";
    case UavStatus::Collided:
      return "collided";
    case UavStatus::TimedOut:
      return "timed_out";
  }
  return "unknown";
}

bool is_terminal(UavStatus status) { return status != UavStatus::Active; }

VelocityCommand clamp_command(const VelocityCommand& cmd) {
  if (!std::isfinite(cmd.forward) || !std::isfinite(cmd.climb) || !std::isfinite(cmd.yaw_rate)) {
    throw ContractViolation("velocity command has a non-finite component");
  }
  return {std::clamp(cmd.forward, CommandBounds::kForwardMin, CommandBounds::kForwardMax),
          std::clamp(cmd.climb, -CommandBounds::kClimbMax, CommandBounds::kClimbMax),
          std::clamp(cmd.yaw_rate, -CommandBounds::kYawRateMax, CommandBounds::kYawRateMax)};
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(radians, two_pi);  // [-pi, pi]
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

bool transition_status(UavState& uav, UavStatus next) {
  if (is_terminal(uav.status) || next == UavStatus::Active) return false;
  uav.status = next;
  return true;
}

double Workspace::volume() const {
  const Vec3 extent = (max_corner - min_corner).cwiseMax(0.0);
  return extent.x() * extent.y() * extent.z();
}

bool Workspace::contains(const Vec3& p) const {
  return (p.array() >= min_corner.array()).all() && (p.array() <= max_corner.array()).all();
}

Vec3 Workspace::clamp(const Vec3& p) const { return p.cwiseMax(min_corner).cwiseMin(max_corner); }

bool WorldState::all_terminal() const {
  return std::all_of(uavs.begin(), uavs.end(), [](const UavState& u) { return is_terminal(u.status); });
}

WorldState step_world(const WorldState& world, std::span<const VelocityCommand> actions, double dt) {
  if (actions.size() != world.uavs.size()) {
    std::ostringstream msg;
    msg << "step_world: got " << actions.size() << " actions for " << world.uavs.size() << " UAVs";
    throw ContractViolation(msg.str());
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("step_world: dt must be positive");

  WorldState next = world;
  for (std::size_t i = 0; i < next.uavs.size(); ++i) {
    UavState& uav = next.uavs[i];
    // Validate every command, including those addressed to frozen UAVs.
    const VelocityCommand cmd = clamp_command(actions[i]);
    if (is_terminal(uav.status)) {
      uav.velocity_cmd = {};
      continue;
    }
    uav.velocity_cmd = cmd;
    // Translation uses the heading held during the period; yaw updates after.
    const Vec3 delta(std::cos(uav.yaw) * cmd.forward * dt, std::sin(uav.yaw) * cmd.forward * dt,
                     cmd.climb * dt);
    uav.position = next.workspace.clamp(uav.position + delta);
    uav.yaw = wrap_angle(uav.yaw + cmd.yaw_rate * dt);
  }
  ++next.time_step;
  return next;
}

std::vector<UavPair> detect_collisions(const WorldState& world) {
  std::vector<UavPair> pairs;
  const double threshold = 2.0 * world.collision_radius;
  const auto& uavs = world.uavs;
  for (std::size_t i = 0; i < uavs.size(); ++i) {
    for (std::size_t j = i + 1; j < uavs.size(); ++j) {
      if (is_terminal(uavs[i].status) && is_terminal(uavs[j].status)) continue;
      if ((uavs[i].position - uavs[j].position).norm() < threshold) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<std::size_t> check_arrivals(const WorldState& world, double arrival_radius) {
  std::vector<std::size_t> arrived;
  for (std::size_t i = 0; i < world.uavs.size(); ++i) {
    const UavState& uav = world.uavs[i];
    if (uav.status != UavStatus::Active) continue;
    if ((uav.position - uav.goal).norm() < arrival_radius) arrived.push_back(i);
  }
  return arrived;
}

}  // namespace uavnav::sim
