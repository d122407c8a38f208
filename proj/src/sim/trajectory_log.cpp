#include "uavnav/sim/trajectory_log.h"

#include <iomanip>

#include "uavnav/common/errors.h"

namespace uavnav::sim {

TrajectoryLogger::TrajectoryLogger(const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open trajectory log " + path.string());
  if (fresh) out_ << kTrajectoryHeader << '\n';
}

void TrajectoryLogger::append(const WorldState& world) {
  out_ << std::setprecision(9);
  for (std::size_t i = 0; i < world.uavs.size(); ++i) {
    const UavState& u = world.uavs[i];
    out_ << world.time_step << ',' << i << ',' << u.position.x() << ',' << u.position.y() << ','
         << u.position.z() << ',' << u.yaw << ',' << to_string(u.status) << '\n';
  }
  if (!out_) throw std::runtime_error("trajectory log write failed");
}

void TrajectoryLogger::flush() { out_.flush(); }

}  // namespace uavnav::sim
