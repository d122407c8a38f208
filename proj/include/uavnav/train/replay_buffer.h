#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uavnav/common/random.h"
#include "uavnav/obs/observation.h"

namespace uavnav::train {

struct Transition {
  obs::Observation obs;
  std::array<float, 3> action{};  // squashed, in [-1, 1]
  float reward = 0.0f;
  obs::Observation next_obs;
  bool done = false;
};

// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_inserted() const { return inserted_; }

  // Logical index: 0 is the oldest stored transition.
  const Transition& at(std::size_t index) const;

  // `count` distinct logical indices drawn uniformly (Floyd's algorithm).
  // Throws ContractViolation when count exceeds size().
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;
  std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> slots_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::uint64_t inserted_ = 0;
};

}  // namespace uavnav::train
