#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace uavnav::sim {

using Vec3 = Eigen::Vector3d;

inline constexpr double kDefaultCollisionRadius = 0.5;
inline constexpr double kDefaultArrivalRadius = 0.5;
inline constexpr double kDefaultControlPeriod = 0.1;

enum class UavStatus { Active, Arrived, Collided, TimedOut };

std::string_view to_string(UavStatus status);
bool is_terminal(UavStatus status);

// Body-frame velocity command: forward (m/s), climb (m/s), steering (rad/s).
struct VelocityCommand {
  double forward = 0.0;
  double climb = 0.0;
  double yaw_rate = 0.0;

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

struct CommandBounds {
  static constexpr double kForwardMin = 0.0;
  static constexpr double kForwardMax = 2.0;
  static constexpr double kClimbMax = 0.5;
  static constexpr double kYawRateMax = 0.5;
};

// Throws ContractViolation on non-finite components, otherwise clamps into
// CommandBounds.
VelocityCommand clamp_command(const VelocityCommand& cmd);

// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

struct UavState {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  VelocityCommand velocity_cmd;
  Vec3 goal = Vec3::Zero();
  UavStatus status = UavStatus::Active;
};

// Moves an Active UAV into `next`. Terminal statuses never change; returns
// whether the transition happened.
bool transition_status(UavState& uav, UavStatus next);

struct Workspace {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();

  double volume() const;
  bool contains(const Vec3& p) const;
  Vec3 clamp(const Vec3& p) const;
};

struct WorldState {
  std::vector<UavState> uavs;
  std::int64_t time_step = 0;
  double collision_radius = kDefaultCollisionRadius;
  Workspace workspace;

  std::size_t size() const { return uavs.size(); }
  bool all_terminal() const;
};

// Advances every Active UAV by one control period with first-order
// velocity-command kinematics. Terminal UAVs hold position and their
// command is zeroed.
WorldState step_world(const WorldState& world, std::span<const VelocityCommand> actions, double dt);

using UavPair = std::pair<std::size_t, std::size_t>;

// Unordered pairs (i < j) closer than 2R with at least one Active member.
std::vector<UavPair> detect_collisions(const WorldState& world);

// Active UAVs strictly within `arrival_radius` of their goal.
std::vector<std::size_t> check_arrivals(const WorldState& world,
                                        double arrival_radius = kDefaultArrivalRadius);

}  // namespace uavnav::sim
