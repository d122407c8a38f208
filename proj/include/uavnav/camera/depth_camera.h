#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "uavnav/sim/world.h"

namespace uavnav::camera {

using sim::Vec3;

// Forward-looking pinhole camera mounted at the UAV body origin, optical axis
// along body +x, level (no pitch). Pixels are square; the vertical field of
// view follows from the aspect ratio.
struct CameraModel {
  int width = 64;
  int height = 64;
  double horizontal_fov = std::numbers::pi / 2.0;
  double max_depth = 20.0;

  void validate() const;
  double focal_length_px() const;
  double vertical_fov() const;
  // Unit ray through the centre of pixel (row, col) in the body frame
  // (x forward, y left, z up). Row 0 is the top of the image, col 0 the left.
  Vec3 body_ray(int row, int col) const;
};

// Row-major H x W metric depth image. Depth is Euclidean ray length; pixels
// with no hit hold exactly max_depth.
struct DepthFrame {
  int width = 0;
  int height = 0;
  double max_depth = 0.0;
  std::int64_t timestamp = 0;
  std::vector<float> data;

  float at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return data[static_cast<std::size_t>(row) * width + col]; }
};

// Renders UAV `uav_index`'s view: every other UAV is a sphere of the world's
// collision radius, plus the ground plane z = 0. The observer never sees
// itself. Throws ContractViolation for an out-of-range index.
DepthFrame render_depth(const sim::WorldState& world, std::size_t uav_index, const CameraModel& camera);

// Smallest pixel strictly below max_depth, or max_depth for an all-miss frame.
double min_depth(const DepthFrame& frame);

// Binary 16-bit PGM (P5, big-endian samples), depth quantized to millimetres.
void write_pgm16(const DepthFrame& frame, const std::filesystem::path& path);

}  // namespace uavnav::camera
