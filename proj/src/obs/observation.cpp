#include "uavnav/obs/observation.h"

#include <algorithm>
#include <cmath>

#include "uavnav/common/errors.h"

namespace uavnav::obs {

FramePtr normalize_frame(const camera::DepthFrame& frame) {
  auto out = std::make_shared<NormalizedFrame>();
  out->width = frame.width;
  out->height = frame.height;
  out->data.resize(frame.data.size());
  const double scale = 1.0 / frame.max_depth;
  std::transform(frame.data.begin(), frame.data.end(), out->data.begin(), [scale](float d) {
    return static_cast<float>(std::clamp(static_cast<double>(d) * scale, 0.0, 1.0));
  });
  return out;
}

void Observation::copy_stack(std::span<float> out) const {
  const std::size_t plane = frames[0]->data.size();
  if (out.size() != plane * kStackDepth) throw ContractViolation("copy_stack: destination size mismatch");
  for (std::size_t k = 0; k < kStackDepth; ++k) {
    std::copy(frames[k]->data.begin(), frames[k]->data.end(), out.begin() + static_cast<std::ptrdiff_t>(k * plane));
  }
}

Vec3 body_frame_goal(const Vec3& position, double yaw, const Vec3& goal) {
  const Vec3 d = goal - position;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return Vec3(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
}

Vec3 world_frame_offset(const Vec3& body_offset, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return Vec3(c * body_offset.x() - s * body_offset.y(), s * body_offset.x() + c * body_offset.y(), body_offset.z());
}

Observation assemble_observation(std::span<const camera::DepthFrame> recent_frames, const sim::UavState& uav) {
  if (recent_frames.empty() || recent_frames.size() > kStackDepth) {
    throw ContractViolation("assemble_observation: need between 1 and 3 frames");
  }
  FrameHistory history;
  for (const auto& frame : recent_frames) history.push(normalize_frame(frame));
  return history.observe(uav);
}

void FrameHistory::push(FramePtr frame) {
  if (!frames_.empty() && (frame->width != frames_.back()->width || frame->height != frames_.back()->height)) {
    throw ContractViolation("FrameHistory: frame resolution changed mid-episode");
  }
  frames_.push_back(std::move(frame));
  while (frames_.size() > kStackDepth) frames_.pop_front();
}

Observation FrameHistory::observe(const sim::UavState& uav) const {
  if (frames_.empty()) throw ContractViolation("FrameHistory: no frames yet");
  Observation o;
  const std::size_t missing = kStackDepth - frames_.size();
  for (std::size_t k = 0; k < kStackDepth; ++k) {
    o.frames[k] = frames_[k < missing ? 0 : k - missing];
  }
  o.rel_goal = body_frame_goal(uav.position, uav.yaw, uav.goal);
  o.velocity = uav.velocity_cmd;
  return o;
}

}  // namespace uavnav::obs
