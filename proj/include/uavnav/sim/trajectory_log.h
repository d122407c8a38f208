#pragma once

#include <filesystem>
#include <fstream>

#include "uavnav/sim/world.h"

namespace uavnav::sim {

// Header line of every trajectory file. Downstream plotting reads exactly
// these columns.
inline constexpr const char* kTrajectoryHeader = "time_step,uav_id,x,y,z,yaw,status";

// Appends one record per UAV per call to a line-delimited CSV file. The
// header is written only when the file is new or empty.
class TrajectoryLogger {
 public:
  explicit TrajectoryLogger(const std::filesystem::path& path);

  void append(const WorldState& world);
  void flush();

 private:
  std::ofstream out_;
};

}  // namespace uavnav::sim
