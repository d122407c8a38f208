#include "uavnav/camera/depth_camera.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "uavnav/common/errors.h"

namespace uavnav::camera {
namespace {

// Nearest positive distance along `dir` (unit) from `origin` to the sphere,
// or +inf. Uses the projection/chord form: t = t_c -/+ sqrt(r^2 - d^2).
double hit_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius) {
  const Vec3 to_center = center - origin;
  const double t_closest = to_center.dot(dir);
  const double perp_sq = to_center.squaredNorm() - t_closest * t_closest;
  const double r_sq = radius * radius;
  if (perp_sq > r_sq) return std::numeric_limits<double>::infinity();
  const double half_chord = std::sqrt(r_sq - perp_sq);
  const double near = t_closest - half_chord;
  if (near > 0.0) return near;
  const double far = t_closest + half_chord;  // origin inside the sphere
  return far > 0.0 ? far : std::numeric_limits<double>::infinity();
}

double hit_ground(const Vec3& origin, const Vec3& dir) {
  if (dir.z() >= 0.0 || origin.z() <= 0.0) return std::numeric_limits<double>::infinity();
  return -origin.z() / dir.z();
}

}  // namespace

void CameraModel::validate() const {
  if (width < 8 || height < 8) throw ContractViolation("camera: width and height must be >= 8");
  if (!(horizontal_fov > 0.0 && horizontal_fov < std::numbers::pi)) {
    throw ContractViolation("camera: horizontal_fov must lie in (0, pi)");
  }
  if (!(max_depth > 0.0) || !std::isfinite(max_depth)) throw ContractViolation("camera: max_depth must be > 0");
}

double CameraModel::focal_length_px() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }

double CameraModel::vertical_fov() const { return 2.0 * std::atan(0.5 * height / focal_length_px()); }

Vec3 CameraModel::body_ray(int row, int col) const {
  const double f = focal_length_px();
  const double right = (col + 0.5 - 0.5 * width) / f;
  const double down = (row + 0.5 - 0.5 * height) / f;
  return Vec3(1.0, -right, -down).normalized();
}

DepthFrame render_depth(const sim::WorldState& world, std::size_t uav_index, const CameraModel& camera) {
  camera.validate();
  if (uav_index >= world.uavs.size()) {
    std::ostringstream msg;
    msg << "render_depth: UAV index " << uav_index << " out of range for " << world.uavs.size() << " UAVs";
    throw ContractViolation(msg.str());
  }
  const sim::UavState& self = world.uavs[uav_index];
  const double c = std::cos(self.yaw);
  const double s = std::sin(self.yaw);

  DepthFrame frame;
  frame.width = camera.width;
  frame.height = camera.height;
  frame.max_depth = camera.max_depth;
  frame.timestamp = world.time_step;
  frame.data.resize(static_cast<std::size_t>(camera.width) * camera.height);

  for (int row = 0; row < camera.height; ++row) {
    for (int col = 0; col < camera.width; ++col) {
      const Vec3 b = camera.body_ray(row, col);
      const Vec3 dir(c * b.x() - s * b.y(), s * b.x() + c * b.y(), b.z());
      double depth = hit_ground(self.position, dir);
      for (std::size_t j = 0; j < world.uavs.size(); ++j) {
        if (j == uav_index) continue;
        depth = std::min(depth, hit_sphere(self.position, dir, world.uavs[j].position, world.collision_radius));
      }
      frame.at(row, col) = static_cast<float>(std::min(depth, camera.max_depth));
    }
  }
  return frame;
}

double min_depth(const DepthFrame& frame) {
  double best = frame.max_depth;
  for (const float d : frame.data) {
    if (d < frame.max_depth) best = std::min(best, static_cast<double>(d));
  }
  return best;
}

void write_pgm16(const DepthFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << frame.width << ' ' << frame.height << "\n65535\n";
  for (const float d : frame.data) {
    const double mm = std::clamp(std::round(static_cast<double>(d) * 1000.0), 0.0, 65535.0);
    const auto v = static_cast<std::uint16_t>(mm);
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(bytes, 2);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace uavnav::camera
