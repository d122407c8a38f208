#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "uavnav/camera/depth_camera.h"
#include "uavnav/sim/world.h"

namespace uavnav::obs {

using sim::Vec3;

inline constexpr int kStackDepth = 3;

// Depth frame divided by max_depth, entries in [0, 1]. Frames are immutable
// once built and shared between consecutive observations of the same UAV.
struct NormalizedFrame {
  int width = 0;
  int height = 0;
  std::vector<float> data;
};

using FramePtr = std::shared_ptr<const NormalizedFrame>;

FramePtr normalize_frame(const camera::DepthFrame& frame);

// o = [depth stack, body-frame relative goal, current commanded velocity].
// frames[0] is the oldest, frames[2] the newest.
struct Observation {
  std::array<FramePtr, kStackDepth> frames;
  Vec3 rel_goal = Vec3::Zero();
  sim::VelocityCommand velocity;

  int height() const { return frames[0]->height; }
  int width() const { return frames[0]->width; }
  float depth(int stack_index, int row, int col) const {
    const NormalizedFrame& f = *frames[static_cast<std::size_t>(stack_index)];
    return f.data[static_cast<std::size_t>(row) * f.width + col];
  }
  // Writes the 3 x H x W stack contiguously into `out`.
  void copy_stack(std::span<float> out) const;
};

// Goal offset rotated into the body frame: Rz(-yaw) * (goal - position).
Vec3 body_frame_goal(const Vec3& position, double yaw, const Vec3& goal);

// Inverse of body_frame_goal's rotation: Rz(yaw) * body_offset.
Vec3 world_frame_offset(const Vec3& body_offset, double yaw);

// Builds an observation from the 1..3 most recent frames (oldest first).
// With fewer than three frames the oldest available frame is repeated at the
// front of the stack.
Observation assemble_observation(std::span<const camera::DepthFrame> recent_frames, const sim::UavState& uav);

// Rolling per-UAV frame history used during rollouts.
class FrameHistory {
 public:
  void push(FramePtr frame);
  Observation observe(const sim::UavState& uav) const;
  bool empty() const { return frames_.empty(); }

 private:
  std::deque<FramePtr> frames_;
};

}  // namespace uavnav::obs
